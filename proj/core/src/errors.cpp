#include "cbrisk/errors.h"

#include <cstdio>

namespace cbrisk {

ParseError::ParseError(std::size_t line, const std::string& what)
    : InputError("line " + std::to_string(line) + ": " + what), line_(line) {}

BlowupError::BlowupError(double time_s, const std::string& what)
    : NumericalError([&] {
          char buf[64];
          std::snprintf(buf, sizeof buf, "t = %.4f s: ", time_s);
          return std::string(buf) + what;
      }()),
      time_s_(time_s) {}

namespace {

std::string describe_trace(const std::vector<double>& trace) {
    std::string out = "power flow did not converge; mismatch trace:";
    char buf[32];
    for (std::size_t k = 0; k < trace.size(); ++k) {
        std::snprintf(buf, sizeof buf, " [%zu] %.3e", k, trace[k]);
        out += buf;
    }
    return out;
}

}  // namespace

ConvergenceError::ConvergenceError(std::vector<double> trace)
    : NumericalError(describe_trace(trace)), trace_(std::move(trace)) {}

}  // namespace cbrisk
