#pragma once

#include <stdexcept>
#include <string>

namespace oppsched {

enum class Errc {
  empty_instance,
  invalid_probability,
  invalid_reward,
  invalid_time,
  duplicate_id,
  parse_error,
  invalid_schedule,
  negative_eta,
  instance_too_large,
  unknown_index,
  invalid_replications,
  negative_time,
  unsupported_distribution,
  empty_input,
  invalid_range,
  invalid_steps,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::empty_instance:           return "EmptyInstance";
    case Errc::invalid_probability:      return "InvalidProbability";
    case Errc::invalid_reward:           return "InvalidReward";
    case Errc::invalid_time:             return "InvalidTime";
    case Errc::duplicate_id:             return "DuplicateId";
    case Errc::parse_error:              return "ParseError";
    case Errc::invalid_schedule:         return "InvalidSchedule";
    case Errc::negative_eta:             return "NegativeEta";
    case Errc::instance_too_large:       return "InstanceTooLarge";
    case Errc::unknown_index:            return "UnknownIndex";
    case Errc::invalid_replications:     return "InvalidReplications";
    case Errc::negative_time:            return "NegativeTime";
    case Errc::unsupported_distribution: return "UnsupportedDistribution";
    case Errc::empty_input:              return "EmptyInput";
    case Errc::invalid_range:            return "InvalidRange";
    case Errc::invalid_steps:            return "InvalidSteps";
  }
  return "UnknownError";
}

/// Domain error carrying one of the named error codes above. what() is a
/// single line of the form "ErrorName: detail".
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& detail)
      : std::runtime_error(std::string(errc_name(code)) + ": " + detail), code_(code) {}

  Errc code() const { return code_; }
  const char* name() const { return errc_name(code_); }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& detail) {
  throw Error(code, detail);
}

}  // namespace oppsched
