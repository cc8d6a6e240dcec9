#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace kshock {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Vec3 = Eigen::Vector3d;
using Vec5 = Eigen::Matrix<double, 5, 1>;
using Mat5 = Eigen::Matrix<double, 5, 5>;

// Failure classes map onto CLI exit codes.
enum class ErrorKind { config = 2, assumption = 3, solver = 4, acceptance = 5 };

class Error : public std::runtime_error
{
 public:
  Error(ErrorKind kind, const std::string& msg)
      : std::runtime_error(msg)
      , kind_(kind)
  {
  }
  ErrorKind kind() const { return kind_; }
  int exit_code() const { return static_cast<int>(kind_); }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& msg) { throw Error(kind, msg); }

inline void require(bool ok, ErrorKind kind, const std::string& msg)
{
  if (!ok) fail(kind, msg);
}

constexpr double pi = 3.14159265358979323846;

}  // namespace kshock
