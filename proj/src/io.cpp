#include "plap/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "plap/error.hpp"

namespace plap::io {

namespace fs = std::filesystem;

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

namespace {

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

std::string grid_line(const Grid& g) {
  return "# grid a=" + format_number(g.a) + " b=" + format_number(g.b) + " n=" + std::to_string(g.n) + "\n";
}

struct Table {
  Grid grid;
  std::vector<std::vector<double>> cols;
};

Table read_table(const fs::path& path, int columns) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw IoError(path.string() + ": empty file");
  double a = 0, b = 0;
  int n = 0;
  if (std::sscanf(line.c_str(), "# grid a=%lf b=%lf n=%d", &a, &b, &n) != 3)
    throw IoError(path.string() + ": missing grid header");
  Table t;
  try {
    t.grid = Grid::uniform(a, b, n);
  } catch (const Error& e) {
    throw IoError(path.string() + ": " + e.what());
  }
  t.cols.assign(columns, {});
  if (!std::getline(in, line)) throw IoError(path.string() + ": missing column header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    int c = 0;
    while (std::getline(ss, cell, ',')) {
      if (c >= columns) throw IoError(path.string() + ": too many columns");
      try {
        t.cols[c++].push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw IoError(path.string() + ": bad number '" + cell + "'");
      }
    }
    if (c != columns) throw IoError(path.string() + ": too few columns");
  }
  if (static_cast<int>(t.cols[0].size()) != n)
    throw IoError(path.string() + ": row count does not match the grid header");
  return t;
}

}  // namespace

void write_profile_csv(const fs::path& path, const Profile& f) {
  auto out = open_out(path);
  out << grid_line(f.grid) << "x,value\n";
  for (int i = 0; i < f.size(); ++i) out << format_number(f.grid.x(i)) << ',' << format_number(f[i]) << '\n';
}

Profile read_profile_csv(const fs::path& path) {
  Table t = read_table(path, 2);
  return Profile(t.grid, std::move(t.cols[1]));
}

void write_trajectory_csv(const fs::path& path, const ivp::Trajectory& t) {
  auto out = open_out(path);
  out << "x,y,dy,status_code\n";
  const int code = static_cast<int>(t.status);
  for (int i = 0; i < t.size(); ++i)
    out << format_number(t.nodes[i]) << ',' << format_number(t.y[i]) << ',' << format_number(t.dy[i]) << ','
        << code << '\n';
}

void write_pair_csv(const fs::path& path, const SolutionPair& pair) {
  auto out = open_out(path);
  out << grid_line(pair.grid) << "x,U,V\n";
  for (int i = 0; i < pair.grid.n; ++i)
    out << format_number(pair.grid.x(i)) << ',' << format_number(pair.U[i]) << ',' << format_number(pair.V[i])
        << '\n';
}

SolutionPair read_pair_csv(const fs::path& path, double p) {
  Table t = read_table(path, 3);
  return SolutionPair::from_profiles(Profile(t.grid, std::move(t.cols[1])), Profile(t.grid, std::move(t.cols[2])), p);
}

Json pair_sidecar(const SolutionPair& pair) {
  Json j;
  j["format_version"] = kFormatVersion;
  j["p"] = pair.p;
  j["R"] = pair.R;
  j["n"] = pair.grid.n;
  j["T_inf"] = number(pair.T_inf);
  j["b1"] = number(pair.b1);
  j["b2"] = number(pair.b2);
  j["grad_norm"] = number(pair.grad_norm);
  j["energy"] = number(pair.energy);
  return j;
}

void apply_sidecar(SolutionPair& pair, const Json& j) {
  auto get = [&](const char* key) {
    return j.contains(key) && j[key].is_number() ? j[key].get<double>() : std::nan("");
  };
  if (j.contains("p") && j["p"].is_number()) pair.p = j["p"].get<double>();
  pair.T_inf = get("T_inf");
  pair.b1 = get("b1");
  pair.b2 = get("b2");
  pair.grad_norm = get("grad_norm");
  pair.energy = get("energy");
}

void write_lambda_csv(const fs::path& path, const lambda::LambdaSolution& sol) {
  auto out = open_out(path);
  const Grid& g = sol.u.grid;
  out << grid_line(g) << "x,u,v\n";
  for (int i = 0; i < g.n; ++i)
    out << format_number(g.x(i)) << ',' << format_number(sol.u[i]) << ',' << format_number(sol.v[i]) << '\n';
}

Json sweep_json(const lambda::SweepReport& rep) {
  Json entries = Json::array();
  for (const auto& e : rep.entries) {
    Json j;
    j["Lambda"] = e.Lambda;
    j["lambda1"] = number(e.lambda1);
    j["lambda2"] = number(e.lambda2);
    j["T_Lambda"] = number(e.T_Lambda);
    j["T_drift"] = number(e.T_drift);
    j["m_Lambda"] = number(e.m_Lambda);
    j["x_Lambda"] = number(e.x_Lambda);
    j["scale_invariant"] = number(e.scale_invariant);
    j["edge_scale"] = number(e.edge_scale);
    j["rescaled_distance"] = number(e.rescaled_distance);
    j["iterations"] = e.iterations;
    entries.push_back(std::move(j));
  }
  Json j;
  j["format_version"] = kFormatVersion;
  j["entries"] = std::move(entries);
  return j;
}

void write_json(const fs::path& path, const Json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

Json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  try {
    return Json::parse(in);
  } catch (const std::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

}  // namespace plap::io
