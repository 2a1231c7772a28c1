#pragma once

// Plain-text formats. Every number is written with 17 significant digits so that
// a write/read round trip is exact and repeated runs produce identical bytes.

#include <filesystem>
#include <string>

#include <json.hpp>

#include "plap/core.hpp"
#include "plap/ivp.hpp"
#include "plap/lambda.hpp"
#include "plap/pair.hpp"

namespace plap::io {

using Json = nlohmann::ordered_json;

inline constexpr int kFormatVersion = 1;

/// "%.17g".
std::string format_number(double v);

/// `# grid a=<a> b=<b> n=<n>`, then `x,value` rows.
void write_profile_csv(const std::filesystem::path& path, const Profile& f);
/// Throws IoError on unreadable or malformed files.
Profile read_profile_csv(const std::filesystem::path& path);

/// `x,y,dy,status_code`; the status code is repeated on every row.
void write_trajectory_csv(const std::filesystem::path& path, const ivp::Trajectory& t);

/// `# grid ...`, then `x,U,V` rows.
void write_pair_csv(const std::filesystem::path& path, const SolutionPair& pair);
SolutionPair read_pair_csv(const std::filesystem::path& path, double p);

/// {format_version, p, R, n, T_inf, b1, b2, grad_norm, energy}.
Json pair_sidecar(const SolutionPair& pair);
/// Restores the scalar fields written by pair_sidecar.
void apply_sidecar(SolutionPair& pair, const Json& j);

/// `# grid ...`, then `x,u,v` rows.
void write_lambda_csv(const std::filesystem::path& path, const lambda::LambdaSolution& sol);

Json sweep_json(const lambda::SweepReport& rep);

/// Non-finite numbers become null. Output ends with a newline.
void write_json(const std::filesystem::path& path, const Json& j);
Json read_json(const std::filesystem::path& path);

/// Finite doubles pass through; NaN and infinities map to null.
Json number(double v);

}  // namespace plap::io
