#pragma once
// CSV emission. Schemas are fixed strings here so tests can pin them
// byte-exact.

#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "tracekit/text.hpp"

namespace tracekit {

inline constexpr const char* kMeansCsvHeader = "j,mean,stderr,kind";
inline constexpr const char* kIdentityCsvHeader = "w_re,w_im,lhs_re,lhs_im,rhs_re,rhs_im,residual";
inline constexpr const char* kWeakBoundCsvHeader = "n,L,max,bound,consistent";
inline constexpr const char* kGapCsvHeader = "j,b_j";
inline constexpr const char* kTvCsvHeader = "T,max_tv,bound";
inline constexpr const char* kDistinguishCsvHeader = "trial,truth,estimate,correct";
inline constexpr const char* kSweepRateCsvHeader = "n,q,lambda,beta,T,trials,successes,rate";
inline constexpr const char* kSweepT90CsvHeader = "n,q,trials_per_probe,T90";
inline constexpr const char* kRunLogCsvHeader = "config_hash,task,seconds,version,metrics";

class CsvWriter {
 public:
  CsvWriter(std::ostream& out, const std::string& header) : out_(out) { out_ << header << "\n"; }

  template <typename... Fields>
  void row(const Fields&... fields) {
    bool first = true;
    ((out_ << (first ? "" : ",") << field(fields), first = false), ...);
    out_ << "\n";
  }

 private:
  static std::string field(double v) { return format_double(v); }
  static std::string field(const std::string& s) { return s; }
  static std::string field(const char* s) { return s; }
  static std::string field(bool b) { return b ? "1" : "0"; }
  template <typename T>
  static std::string field(T v) {
    return std::to_string(v);
  }

  std::ostream& out_;
};

inline std::ofstream open_output_file(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot open output file: " + path);
  return out;
}

}  // namespace tracekit
