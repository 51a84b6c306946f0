#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "oppsched/errors.hpp"

namespace oppsched {

enum class DistFamily { deterministic, exponential };

/// Response-time law, parameterized by its mean. Deterministic(theta) is a
/// point mass at theta; Exponential(theta) has CDF 1 - exp(-t/theta).
struct ResponseTimeDistribution {
  DistFamily family = DistFamily::exponential;
  double mean = 1.0;

  double cdf(double t) const;
  /// Inverse-CDF sample from u in (0,1). Deterministic ignores u.
  double sample(double u) const;

  bool operator==(const ResponseTimeDistribution&) const = default;
};

/// One selectable option: reward r on success, success probability p in
/// (0,1], random response time with mean theta > 0.
struct Opportunity {
  std::string id;
  double reward = 0.0;
  double success_prob = 1.0;
  double mean_response_time = 1.0;
  DistFamily dist_family = DistFamily::exponential;

  ResponseTimeDistribution response_dist() const {
    return {dist_family, mean_response_time};
  }

  bool operator==(const Opportunity&) const = default;
};

/// Validated, immutable-by-convention collection of opportunities. Input
/// order is preserved: record k of the raw input is index k here.
struct Instance {
  std::vector<Opportunity> opportunities;

  int32_t size() const { return static_cast<int32_t>(opportunities.size()); }
  const Opportunity& at(int32_t i) const { return opportunities[static_cast<size_t>(i)]; }

  double max_reward() const;
  double total_mean_time() const;

  bool operator==(const Instance&) const = default;
};

/// Trying order: a sequence of distinct 0-based indices into an Instance.
/// The external text form is 1-based and '-'-joined ("4-1-5-2-3").
struct Schedule {
  std::vector<int32_t> order;

  static Schedule identity(int32_t n);
  /// Parses a dashed 1-based literal such as "4-1-5-2-3".
  static Schedule parse(const std::string& text);

  int32_t size() const { return static_cast<int32_t>(order.size()); }
  std::string to_string() const;

  bool operator==(const Schedule&) const = default;
};

/// Throws InvalidSchedule unless sched is a permutation of inst's indices.
void require_schedule_for(const Instance& inst, const Schedule& sched);

/// Validates raw records and builds an Instance (order preserved).
/// Errors: EmptyInstance, InvalidReward, InvalidProbability, InvalidTime,
/// DuplicateId.
Instance validate_instance(std::vector<Opportunity> records);

enum class FileFormat { csv, json };

/// CSV schema: header "id,reward,prob,mean_time[,dist]", dist in {det,exp}
/// (defaults to exp). JSON schema: array of {"id","reward","prob",
/// "mean_time","dist"?}.
Instance parse_instance_csv(std::istream& in);
Instance parse_instance_json(std::istream& in);
Instance parse_instance_file(const std::string& path,
                             std::optional<FileFormat> format = std::nullopt);

void serialize_instance_csv(const Instance& inst, std::ostream& out);
void serialize_instance_json(const Instance& inst, std::ostream& out);

}  // namespace oppsched
