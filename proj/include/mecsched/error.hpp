#pragma once

#include <stdexcept>
#include <string>

namespace mecsched {

// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A scenario document or in-memory scenario violates a model invariant.
// The message starts with a JSON-pointer-like path, e.g. "jobs[3].windows[0].end".
class ScenarioError : public Error {
 public:
  ScenarioError(const std::string& path, const std::string& what)
      : Error(path + ": " + what), path_(path) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

// A coverage window was used with the wrong transfer direction.
class InvalidWindow : public Error {
 public:
  using Error::Error;
};

// No backhaul latency is known for a (vAP, server) pair.
class MissingBackhaulEntry : public Error {
 public:
  using Error::Error;
};

// Instance enumeration exceeded the configured cap.
class EnumerationOverflow : public Error {
 public:
  EnumerationOverflow(const std::string& job_id, std::size_t cap)
      : Error("instance enumeration overflow at job '" + job_id + "' (cap " +
              std::to_string(cap) + ")"),
        job_id_(job_id) {}
  const std::string& job_id() const noexcept { return job_id_; }

 private:
  std::string job_id_;
};

// An algorithm parameter is outside its domain (e.g. kappa < 1).
class ParameterError : public Error {
 public:
  using Error::Error;
};

// LP is malformed, too large for the configured limits, or unbounded.
class LpError : public Error {
 public:
  using Error::Error;
};

// An invariant the algorithms rely on was broken; indicates a bug or bad input.
class InternalError : public Error {
 public:
  using Error::Error;
};

// The workload generator could not hit the requested utilization band.
class GenerationFailure : public Error {
 public:
  GenerationFailure(const std::string& what, double closest_ub, double closest_uc)
      : Error(what), closest_ub_(closest_ub), closest_uc_(closest_uc) {}
  double closest_ub() const noexcept { return closest_ub_; }
  double closest_uc() const noexcept { return closest_uc_; }

 private:
  double closest_ub_;
  double closest_uc_;
};

// The exact oracle refuses inputs above its size caps.
class OracleRefused : public Error {
 public:
  using Error::Error;
};

}  // namespace mecsched
