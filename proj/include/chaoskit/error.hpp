#pragma once

#include <stdexcept>
#include <string>

namespace chaoskit {

// Error classes map one-to-one onto CLI exit codes.
enum class ErrorKind { io = 3, config = 2, numeric = 4, data = 5 };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline Error io_error(const std::string& what) { return {ErrorKind::io, what}; }
inline Error config_error(const std::string& what) { return {ErrorKind::config, what}; }
inline Error numeric_error(const std::string& what) { return {ErrorKind::numeric, what}; }
inline Error data_error(const std::string& what) { return {ErrorKind::data, what}; }

inline int exit_code(ErrorKind kind) { return static_cast<int>(kind); }

}  // namespace chaoskit
