#ifndef HGR_IO_HPP
#define HGR_IO_HPP

// File formats.
//
//   joint CSV     header x1,...,xp,y,prob   one atom per row, missing atoms = 0
//   dataset CSV   header x1,...,xp,y        one sample per row
//   generic CSV   header x,y,prob           arbitrary finite alphabets
//   marginals     {"p", "m", "xx": {"i,j": m*m row-major}, "xy": {"i": m*2 row-major}}
//                 1-based variable indices, i < j
//   moments       {"mu": [p+1], "lambda": (p+1)^2 row-major}, Y last
//
// X alphabets in the CSV formats are sized max(label) + 1 (at least 2) unless
// an explicit m is passed. All readers throw Error(ParseError) on malformed
// input; domain validation errors keep their own codes.

#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"

#include "hgr/distributions.hpp"
#include "hgr/gaussian.hpp"
#include "hgr/hgr_oracle.hpp"

namespace hgr::io {

std::string read_file(const std::string& path);

DiscreteJoint parse_joint_csv(std::string_view text, std::optional<int> m = std::nullopt);
Dataset parse_dataset_csv(std::string_view text, std::optional<int> m = std::nullopt);
GenericJoint parse_generic_csv(std::string_view text);
PairwiseMarginalSet parse_marginals_json(std::string_view text);
GaussianMoments parse_moments_json(std::string_view text);

/// All m^p * 2 atoms in mixed-radix order, probabilities with 17 significant digits.
std::string format_joint_csv(const DiscreteJoint& joint);
nlohmann::json marginals_to_json(const PairwiseMarginalSet& marginals);

/// Compact JSON with sorted keys; every floating-point number is printed with
/// 17 significant digits and non-finite values become null.
std::string dump_json(const nlohmann::json& value);

/// "sha256:<hex>" of the bytes.
std::string content_digest(std::string_view bytes);

/// Column-major Eigen object as nested row arrays.
nlohmann::json to_json(const Eigen::MatrixXd& m);
nlohmann::json to_json(const Eigen::VectorXd& v);

}  // namespace hgr::io

#endif  // HGR_IO_HPP
