#ifndef SUPPSIZE_IO_HPP
#define SUPPSIZE_IO_HPP

// Text formats:
//   distribution TSV   id<TAB>mass per line, '#' comments, masses decimal or p/q
//   distribution JSON  [{"id": 1, "mass": "1/3"}, ...]
//   labelled sample    id<TAB>label per line, label 0 or 1
//   raw sample         one id per line
// Written masses are exact "p/q" strings, so files round-trip bit-exactly.

#include "suppsize/distribution.hpp"
#include "suppsize/functions.hpp"
#include "suppsize/rational.hpp"

#include <json.hpp>

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace suppsize {

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string_view> split_fields(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    if (i == s.size()) break;
    const auto j = s.find_first_of(" \t", i);
    out.push_back(s.substr(i, j == std::string_view::npos ? std::string_view::npos : j - i));
    i = j == std::string_view::npos ? s.size() : j;
  }
  return out;
}

template <class Int>
Int parse_int(std::string_view s, const std::string& where) {
  Int v{};
  const auto* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || p != end) throw InputError(where + "expected an integer, got '" + std::string(s) + "'");
  return v;
}

inline std::string line_tag(std::size_t line) { return "line " + std::to_string(line) + ": "; }

// Calls fn(fields, tag) for every non-blank, non-comment line.
template <class F>
void for_each_record(std::istream& in, F&& fn) {
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto body = trim(raw);
    if (body.empty() || body.front() == '#') continue;
    fn(split_fields(body), line_tag(line));
  }
}

inline Rational parse_mass(std::string_view s, const std::string& where) {
  try {
    return parse_rational(s);
  } catch (const std::invalid_argument& e) {
    throw InputError(where + e.what());
  }
}

inline SparseDistribution finish_distribution(std::vector<Atom> atoms) {
  try {
    return SparseDistribution::renormalized(std::move(atoms));
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
}

}  // namespace detail

inline SparseDistribution read_distribution_tsv(std::istream& in) {
  std::vector<Atom> atoms;
  detail::for_each_record(in, [&](const auto& f, const std::string& tag) {
    if (f.size() != 2) throw InputError(tag + "expected 'id<TAB>mass'");
    atoms.push_back({detail::parse_int<Id>(f[0], tag), detail::parse_mass(f[1], tag)});
  });
  return detail::finish_distribution(std::move(atoms));
}

inline SparseDistribution parse_distribution_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_array()) throw InputError("distribution JSON must be an array of {id, mass}");
  std::vector<Atom> atoms;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string tag = "entry " + std::to_string(i) + ": ";
    const auto& e = j[i];
    if (!e.is_object() || !e.contains("id") || !e.contains("mass")) throw InputError(tag + "expected {id, mass}");
    Id id;
    if (e["id"].is_number_integer()) id = e["id"].get<Id>();
    else if (e["id"].is_string()) id = detail::parse_int<Id>(e["id"].get<std::string>(), tag);
    else throw InputError(tag + "id must be an integer");
    if (!e["mass"].is_string()) throw InputError(tag + "mass must be a string");
    atoms.push_back({id, detail::parse_mass(e["mass"].get<std::string>(), tag)});
  }
  return detail::finish_distribution(std::move(atoms));
}

inline void write_distribution_tsv(std::ostream& out, const SparseDistribution& dist) {
  for (const auto& a : dist.atoms()) out << a.id << '\t' << to_string(a.mass) << '\n';
}

inline std::string distribution_json(const SparseDistribution& dist) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& a : dist.atoms()) j.push_back({{"id", a.id}, {"mass", to_string(a.mass)}});
  return j.dump();
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// JSON when the file starts with '[', TSV otherwise.
inline SparseDistribution load_distribution_file(const std::string& path) {
  const std::string text = read_file(path);
  const auto body = detail::trim(text);
  if (!body.empty() && body.front() == '[') return parse_distribution_json(text);
  std::istringstream in(text);
  return read_distribution_tsv(in);
}

// family:arg:arg, or @path for a file.
//   uniform:k  zipf:k:s  two_level:n_heavy:n_light:mu_light
//   far_uniform:n:eps_target[:margin]  point
inline SparseDistribution make_distribution(std::string_view spec) {
  if (!spec.empty() && spec.front() == '@') return load_distribution_file(std::string(spec.substr(1)));
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    const auto colon = spec.find(':', start);
    parts.push_back(spec.substr(start, colon == std::string_view::npos ? std::string_view::npos : colon - start));
    if (colon == std::string_view::npos) break;
    start = colon + 1;
  }
  const std::string tag = "distribution '" + std::string(spec) + "': ";
  const auto family = parts[0];
  auto want = [&](std::size_t lo, std::size_t hi) {
    if (parts.size() - 1 < lo || parts.size() - 1 > hi) throw InputError(tag + "wrong number of parameters");
  };
  auto integer = [&](std::size_t i) { return detail::parse_int<std::int64_t>(parts[i], tag); };
  auto rational = [&](std::size_t i) { return detail::parse_mass(parts[i], tag); };
  try {
    if (family == "point") {
      want(0, 0);
      return uniform_distribution(1);
    }
    if (family == "uniform") {
      want(1, 1);
      return uniform_distribution(integer(1));
    }
    if (family == "zipf") {
      want(2, 2);
      return zipf_distribution(integer(1), to_double(rational(2)));
    }
    if (family == "two_level") {
      want(3, 3);
      return two_level_distribution(integer(1), integer(2), rational(3));
    }
    if (family == "far_uniform") {
      want(2, 3);
      return far_uniform_distribution(integer(1), rational(2), parts.size() > 3 ? rational(3) : Rational(0));
    }
  } catch (const std::invalid_argument& e) {
    throw InputError(tag + e.what());
  }
  throw InputError(tag + "unknown family (uniform, zipf, two_level, far_uniform, point)");
}

inline LabeledSample read_labeled_tsv(std::istream& in) {
  LabeledSample s;
  detail::for_each_record(in, [&](const auto& f, const std::string& tag) {
    if (f.size() != 2) throw InputError(tag + "expected 'id<TAB>label'");
    const int label = detail::parse_int<int>(f[1], tag);
    if (label != 0 && label != 1) throw InputError(tag + "label must be 0 or 1");
    s.pairs.push_back({detail::parse_int<Id>(f[0], tag), label});
  });
  if (!s.consistent()) throw InputError("labeled sample gives one id two different labels");
  return s;
}

inline std::vector<Id> read_ids(std::istream& in) {
  std::vector<Id> ids;
  detail::for_each_record(in, [&](const auto& f, const std::string& tag) {
    if (f.size() != 1) throw InputError(tag + "expected one id per line");
    ids.push_back(detail::parse_int<Id>(f[0], tag));
  });
  return ids;
}

}  // namespace suppsize

#endif  // SUPPSIZE_IO_HPP
