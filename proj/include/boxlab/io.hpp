#pragma once

// JSON and CSV encodings used by the command-line tool. Field order is
// fixed and floats are written with 17 significant digits, so identical
// inputs give byte-identical output.

#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "boxlab/boxes.hpp"
#include "boxlab/dilation.hpp"
#include "boxlab/errors.hpp"
#include "boxlab/lhv.hpp"
#include "boxlab/protocol.hpp"
#include "boxlab/seesaw.hpp"
#include "boxlab/tensorcore.hpp"
#include "boxlab/tsirelson.hpp"

namespace boxlab::io {

using json = nlohmann::ordered_json;

inline std::string format_double(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

inline bool is_scalar(const json& j) { return !j.is_object() && !j.is_array(); }

inline bool is_flat_array(const json& j) {
  if (!j.is_array()) return false;
  for (const auto& e : j)
    if (!is_scalar(e)) return false;
  return true;
}

inline void write(std::ostringstream& os, const json& j, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << "{\n";
      bool first = true;
      for (const auto& [k, v] : j.items()) {
        if (!first) os << ",\n";
        first = false;
        os << inner << json(k).dump() << ": ";
        write(os, v, indent + 1);
      }
      os << "\n" << pad << "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        os << "[]";
        return;
      }
      if (is_flat_array(j)) {
        os << "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) os << ", ";
          write(os, j[i], indent + 1);
        }
        os << "]";
        return;
      }
      os << "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) os << ",\n";
        os << inner;
        write(os, j[i], indent + 1);
      }
      os << "\n" << pad << "]";
      return;
    }
    case json::value_t::number_float:
      os << format_double(j.get<double>());
      return;
    default:
      os << j.dump();
  }
}

}  // namespace detail

/// Deterministic text form, newline-terminated.
inline std::string dump(const json& j) {
  std::ostringstream os;
  detail::write(os, j, 0);
  os << "\n";
  return os.str();
}

inline json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

// --- boxes -----------------------------------------------------------------

inline json to_json(const Box& box) {
  const auto& s = box.shape();
  json probs = json::array();
  for (std::size_t a = 0; a < s.d_a; ++a) {
    json pa = json::array();
    for (std::size_t b = 0; b < s.d_b; ++b) {
      json pb = json::array();
      for (std::size_t x = 0; x < s.d_x; ++x) {
        json px = json::array();
        for (std::size_t y = 0; y < s.d_y; ++y) px.push_back(box(a, b, x, y));
        pb.push_back(std::move(px));
      }
      pa.push_back(std::move(pb));
    }
    probs.push_back(std::move(pa));
  }
  return json{{"d_x", s.d_x}, {"d_y", s.d_y}, {"d_a", s.d_a}, {"d_b", s.d_b}, {"probs", std::move(probs)}};
}

inline Box box_from_json(const json& j) {
  try {
    const BoxShape s{j.at("d_x").get<std::size_t>(), j.at("d_y").get<std::size_t>(), j.at("d_a").get<std::size_t>(),
                     j.at("d_b").get<std::size_t>()};
    const auto& probs = j.at("probs");
    std::vector<double> p(s.size());
    if (probs.size() != s.d_a) throw InvalidArgument("probs: expected " + std::to_string(s.d_a) + " entries for a");
    for (std::size_t a = 0; a < s.d_a; ++a) {
      if (probs[a].size() != s.d_b) throw InvalidArgument("probs: wrong extent for b");
      for (std::size_t b = 0; b < s.d_b; ++b) {
        if (probs[a][b].size() != s.d_x) throw InvalidArgument("probs: wrong extent for x");
        for (std::size_t x = 0; x < s.d_x; ++x) {
          if (probs[a][b][x].size() != s.d_y) throw InvalidArgument("probs: wrong extent for y");
          for (std::size_t y = 0; y < s.d_y; ++y) p[s.offset(a, b, x, y)] = probs[a][b][x][y].get<double>();
        }
      }
    }
    return Box(s, std::move(p));
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("malformed box JSON: ") + e.what());
  }
}

inline Box box_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("invalid JSON: ") + e.what());
  }
  if (j.is_object() && j.contains("box")) return box_from_json(j.at("box"));
  return box_from_json(j);
}

// --- linear algebra ----------------------------------------------------------

inline json to_json(const RegisterLayout& l) {
  json regs = json::array();
  for (const auto& r : l) regs.push_back(json{{"name", r.name}, {"dim", r.dim}, {"party", std::string(to_string(r.party))}});
  return regs;
}

inline json to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(json::array({m(i, j).real(), m(i, j).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline json to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(json::array({v(i).real(), v(i).imag()}));
  return out;
}

inline json to_json(const DilationResult& dr) {
  json anc = json::array();
  for (const auto& n : dr.roles.ancilla) anc.push_back(n);
  return json{{"kind", dr.kind},
              {"layout", to_json(dr.layout)},
              {"roles",
               json{{"input_a", dr.roles.input_a},
                    {"input_b", dr.roles.input_b},
                    {"output_a", dr.roles.output_a},
                    {"output_b", dr.roles.output_b},
                    {"ancilla", std::move(anc)}}},
              {"initial_ancilla", to_json(dr.initial_ancilla.amplitudes())},
              {"matrix", to_json(dr.u.matrix())}};
}

// --- results -----------------------------------------------------------------

inline json to_json(const ProtocolTranscript& t) {
  json p = json::array();
  for (const auto& row : t.p_z_given_x) p.push_back(row);
  return json{{"d", t.d},
              {"with_copy", t.with_copy},
              {"p_z_given_x", std::move(p)},
              {"capacity_bits", t.capacity_bits},
              {"ent_before", t.entanglement_before_ebits},
              {"ent_after", t.entanglement_after_ebits},
              {"ent_gain", t.entanglement_gain()}};
}

inline json to_json(const BoundReport& r) {
  return json{{"d", r.d},
              {"bell_value", r.bell_value},
              {"c1_lhs", r.c1_lhs},
              {"c1_rhs", r.c1_rhs},
              {"c2_lhs", r.c2_lhs},
              {"quantum_upper", optional_number(r.quantum_upper)},
              {"lhv_max", optional_number(r.lhv_max)},
              {"violates_c1", r.violates_c1},
              {"violates_quantum_upper", r.violates_quantum_upper},
              {"violated", r.violates_c1},
              {"exploratory", r.exploratory}};
}

inline std::string csv_header() { return "v,bell_value,c1_lhs,violated\n"; }

/// The v column is left empty when the box is not a noisy PR box.
inline std::string csv_row(std::optional<double> v, const BoundReport& r) {
  return (v ? format_double(*v) : std::string()) + "," + format_double(r.bell_value) + "," + format_double(r.c1_lhs) + "," +
         (r.violates_c1 ? "true" : "false") + "\n";
}

inline json to_json(const DeterministicStrategy& s) {
  return json{{"f_a", s.f_a}, {"g_b", s.g_b}};
}

inline json to_json(const ClassicalMax& m) { return json{{"value", m.value}, {"witness", to_json(m.witness)}}; }

inline json to_json(const Measurement& m) { return json{{"ranks", m.ranks}, {"basis", to_json(m.basis)}}; }

inline json to_json(const QuantumStrategy& q) {
  json alice = json::array(), bob = json::array();
  for (const auto& m : q.alice) alice.push_back(to_json(m));
  for (const auto& m : q.bob) bob.push_back(to_json(m));
  return json{{"local_dim", q.local_dim},
              {"state", to_json(q.state.amplitudes())},
              {"alice", std::move(alice)},
              {"bob", std::move(bob)}};
}

inline json to_json(const OptResult& r) {
  return json{{"best_value", r.best_value},
              {"iterations", r.iterations},
              {"restarts_used", r.restarts_used},
              {"converged", r.converged},
              {"strategy", to_json(r.strategy)}};
}

}  // namespace boxlab::io
