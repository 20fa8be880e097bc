#pragma once

// Byte-stable output: doubles in 17 significant digits ('.' separator, no
// locale), '\n' line endings, keys in insertion order.

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "liouville/disk_solver.hpp"
#include "liouville/errors.hpp"
#include "liouville/mass_relations.hpp"

namespace liouville::io {

using Json = nlohmann::ordered_json;

inline std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

namespace detail {

inline void dump(const Json& j, std::string& out, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string pad_in(static_cast<std::size_t>(indent + 1) * 2, ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad_in + Json(it.key()).dump() + ": ";
        dump(it.value(), out, indent + 1);
      }
      out += "\n" + pad + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // arrays of scalars stay on one line
      bool flat = true;
      for (const auto& v : j) flat = flat && !v.is_structured();
      out += flat ? "[" : "[\n";
      bool first = true;
      for (const auto& v : j) {
        if (!first) out += flat ? ", " : ",\n";
        first = false;
        if (!flat) out += pad_in;
        dump(v, out, indent + 1);
      }
      out += flat ? "]" : "\n" + pad + "]";
      return;
    }
    case Json::value_t::number_float: {
      const double x = j.get<double>();
      // JSON has no inf/nan
      out += std::isfinite(x) ? fmt(x) : "null";
      return;
    }
    default:
      out += j.dump();
  }
}

}  // namespace detail

inline std::string dump_json(const Json& j) {
  std::string out;
  detail::dump(j, out, 0);
  out += '\n';
  return out;
}

struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row) {
    if (row.size() != header.size()) fail(ErrorKind::InvalidInputs, "CSV row width differs from header");
    rows.push_back(std::move(row));
  }
  std::string str() const {
    std::string out;
    auto line = [&](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out += ',';
        out += cells[i];
      }
      out += '\n';
    };
    line(header);
    for (const auto& r : rows) line(r);
    return out;
  }
};

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) fail(ErrorKind::Io, "cannot open " + path + " for writing");
  f.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!f) fail(ErrorKind::Io, "write to " + path + " failed");
}

inline std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(ErrorKind::Io, "cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

inline Json parse_json(const std::string& text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorKind::InvalidInputs, what + ": " + e.what());
  }
}

// HeightInputs <-> JSON

inline Json to_json(const HeightInputs& in) {
  return Json{{"rho", in.rho},
              {"m", in.m},
              {"alpha1", in.alpha1},
              {"alpha2", in.alpha2},
              {"mass_integral", in.mass_integral},
              {"C_ti", in.C_ti},
              {"pairwise_dist", in.pairwise_dist},
              {"green_regular", in.green_regular},
              {"w_at_points", in.w_at_points},
              {"t", in.t}};
}

inline HeightInputs height_inputs_from_json(const Json& j) {
  static const std::vector<std::string> keys{"rho", "m", "alpha1", "alpha2", "mass_integral", "C_ti",
                                             "pairwise_dist", "green_regular", "w_at_points", "t"};
  if (!j.is_object()) fail(ErrorKind::InvalidInputs, "height inputs must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (std::find(keys.begin(), keys.end(), it.key()) == keys.end())
      fail(ErrorKind::InvalidInputs, "unknown key in height inputs: " + it.key());
  HeightInputs in;
  try {
    in.rho = j.at("rho").get<double>();
    in.m = j.at("m").get<int>();
    in.alpha1 = j.at("alpha1").get<int>();
    in.alpha2 = j.at("alpha2").get<int>();
    in.mass_integral = j.at("mass_integral").get<double>();
    in.C_ti = j.at("C_ti").get<std::vector<double>>();
    in.pairwise_dist = j.at("pairwise_dist").get<std::vector<std::vector<double>>>();
    in.green_regular = j.at("green_regular").get<std::vector<std::vector<double>>>();
    in.w_at_points = j.at("w_at_points").get<std::vector<double>>();
    in.t = j.at("t").get<double>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::InvalidInputs, std::string("height inputs: ") + e.what());
  }
  in.validate();
  return in;
}

// Grid solutions: flat little-endian float64 array, ring-major (ring n_r is
// the boundary), with a JSON sidecar describing the mesh and the problem.

inline Json grid_sidecar(const DiskProblem& pb, const DiskSolution& sol, const std::string& bin_name) {
  Json j{{"data", bin_name},
         {"dtype", "float64-le"},
         {"layout", "ring-major; index = j * n_theta + k; r_j = exp(s_min + j h_s), theta_k = 2 pi k / n_theta"},
         {"mesh", {{"s_min", sol.mesh.s_min}, {"n_r", sol.mesh.n_r}, {"n_theta", sol.mesh.n_theta}}},
         {"problem", {{"alpha1", pb.alpha1}, {"alpha2", pb.alpha2}, {"t_vortex", pb.t_vortex}}},
         {"newton_iters", sol.newton_iters},
         {"residual_norm", sol.residual_norm},
         {"converged", sol.converged},
         {"pole", sol.pole},
         {"u_max", sol.u_max}};
  if (sol.lambda_extract) j["lambda_extract"] = *sol.lambda_extract;
  return j;
}

inline void write_grid(const std::string& stem, const DiskProblem& pb, const DiskSolution& sol) {
  std::string bytes(sol.u.size() * sizeof(double), '\0');
  for (std::size_t i = 0; i < sol.u.size(); ++i) {
    auto bits = std::bit_cast<std::uint64_t>(sol.u[i]);
    for (int b = 0; b < 8; ++b) bytes[i * 8 + static_cast<std::size_t>(b)] = static_cast<char>((bits >> (8 * b)) & 0xff);
  }
  write_file(stem + ".bin", bytes);
  const auto slash = stem.find_last_of('/');
  const std::string base = slash == std::string::npos ? stem : stem.substr(slash + 1);
  write_file(stem + ".json", dump_json(grid_sidecar(pb, sol, base + ".bin")));
}

inline std::vector<double> read_grid_values(const std::string& bin_path) {
  const std::string bytes = read_file(bin_path);
  if (bytes.size() % 8 != 0) fail(ErrorKind::Io, bin_path + " is not a float64 array");
  std::vector<double> out(bytes.size() / 8);
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b)
      bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[i * 8 + static_cast<std::size_t>(b)])) << (8 * b);
    out[i] = std::bit_cast<double>(bits);
  }
  return out;
}

}  // namespace liouville::io
