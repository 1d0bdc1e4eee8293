#ifndef PEQS_ERROR_HPP
#define PEQS_ERROR_HPP

#include <stdexcept>
#include <string>

namespace peqs {

enum class errc {
    capacity,
    dimension_mismatch,
    invalid_argument,
    model_mismatch,
    decomposition,
    optimization_failure,
    truncation_warning,
    window,
    io,
};

class error : public std::runtime_error {
  public:
    error(errc code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
    errc code() const { return code_; }

  private:
    errc code_;
};

[[noreturn]] inline void raise(errc code, const std::string& msg) { throw error(code, msg); }

inline void require(bool cond, errc code, const std::string& msg) {
    if (!cond) raise(code, msg);
}

}  // namespace peqs

#endif
