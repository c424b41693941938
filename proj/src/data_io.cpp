#include "dplr/data_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "dplr/errors.hpp"
#include "dplr/harness.hpp"

namespace dplr {

void XDist::validate() const {
  switch (kind) {
    case Kind::Normal:
      if (b < 0.0) throw InvalidSpec("normal x-distribution needs sd >= 0");
      break;
    case Kind::Uniform:
      if (!(a < b)) throw InvalidSpec("uniform x-distribution needs lo < hi");
      break;
    case Kind::Exponential:
      if (!(a > 0.0)) throw InvalidSpec("exponential x-distribution needs scale > 0");
      break;
    case Kind::LogNormal:
      if (b < 0.0) throw InvalidSpec("lognormal x-distribution needs sigma >= 0");
      break;
  }
}

double XDist::mean() const {
  switch (kind) {
    case Kind::Normal: return a;
    case Kind::Uniform: return (a + b) / 2.0;
    case Kind::Exponential: return a;
    case Kind::LogNormal: return std::exp(a + b * b / 2.0);
  }
  return 0.0;  // unreachable
}

double XDist::variance() const {
  switch (kind) {
    case Kind::Normal: return b * b;
    case Kind::Uniform: return (b - a) * (b - a) / 12.0;
    case Kind::Exponential: return a * a;
    case Kind::LogNormal:
      return (std::exp(b * b) - 1.0) * std::exp(2.0 * a + b * b);
  }
  return 0.0;  // unreachable
}

double XDist::sample(RandomSource& rng) const {
  switch (kind) {
    case Kind::Normal: return rng.normal(a, b);
    case Kind::Uniform: return rng.uniform(a, b);
    case Kind::Exponential: return -a * std::log1p(-rng.uniform());
    case Kind::LogNormal: return std::exp(rng.normal(a, b));
  }
  return 0.0;  // unreachable
}

std::int64_t GeneratorSpec::group1_size() const {
  if (!mixture) return 0;
  return static_cast<std::int64_t>(
      std::floor(mixture->frac1 * static_cast<double>(n)));
}

void GeneratorSpec::validate() const {
  x_dist.validate();
  if (sigma_e < 0.0) throw InvalidSpec("sigma_e must be >= 0");
  if (n < 4) throw InvalidSpec("generator needs n >= 4");
  if (mixture) {
    if (!(mixture->frac1 > 0.0 && mixture->frac1 < 1.0))
      throw InvalidSpec("mixture frac1 must be in (0,1)");
    const std::int64_t n1 = group1_size();
    if (n1 < 2 || n - n1 < 2)
      throw InvalidSpec("mixture needs at least 2 rows per group");
  }
}

Dataset generate_linear(const GeneratorSpec& spec, RandomSource& rng) {
  spec.validate();
  if (spec.is_mixture())
    throw InvalidSpec("generate_linear called with a mixture spec");

  Dataset d;
  const std::size_t n = static_cast<std::size_t>(spec.n);
  d.x.resize(n);
  d.y.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    d.x[i] = spec.x_dist.sample(rng);
    d.y[i] = spec.intercept + spec.slope * d.x[i] + rng.normal(0.0, spec.sigma_e);
  }
  return d;
}

GroupedDataset generate_mixture(const GeneratorSpec& spec, RandomSource& rng) {
  spec.validate();
  if (!spec.is_mixture())
    throw InvalidSpec("generate_mixture called without a mixture spec");

  GroupedDataset g;
  const std::size_t n = static_cast<std::size_t>(spec.n);
  const std::size_t n1 = static_cast<std::size_t>(spec.group1_size());
  g.n1 = static_cast<std::int64_t>(n1);
  g.x.resize(n);
  g.y.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double slope = i < n1 ? spec.slope : spec.mixture->slope2;
    g.x[i] = spec.x_dist.sample(rng);
    g.y[i] = slope * g.x[i] + rng.normal(0.0, spec.sigma_e);
  }
  return g;
}

AnyDataset generate(const GeneratorSpec& spec, RandomSource& rng) {
  if (spec.is_mixture()) return generate_mixture(spec, rng);
  return generate_linear(spec, rng);
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t')) --e;
  return s.substr(b, e - b);
}

double parse_real(const std::string& raw, std::size_t line_no, const std::string& col) {
  const std::string cell = trim(raw);
  double value = 0.0;
  const char* begin = cell.data();
  const char* end = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end || cell.empty()) {
    throw ParseError(line_no, col, "cannot parse '" + cell + "' as a real number (line " +
                                       std::to_string(line_no) + ", column " + col + ")");
  }
  return value;
}

}  // namespace

AnyDataset read_csv(const std::string& path, const std::string& x_col,
                    const std::string& y_col,
                    const std::optional<std::string>& group_col) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);

  std::string line;
  if (!std::getline(in, line)) throw ParseError(1, "", "empty file: " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);

  const std::vector<std::string> header = split_fields(line);
  auto col_index = [&](const std::string& name) -> std::size_t {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (trim(header[i]) == name) return i;
    }
    throw MissingColumn("column '" + name + "' not found in " + path);
  };
  const std::size_t xi = col_index(x_col);
  const std::size_t yi = col_index(y_col);
  const std::size_t gi = group_col ? col_index(*group_col) : 0;
  const std::size_t needed = std::max(std::max(xi, yi), group_col ? gi : 0);

  std::vector<double> xs, ys;
  std::vector<int> groups;  // 0 or 1, parallel to xs/ys
  std::string label[2];
  int labels_seen = 0;

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_fields(line);
    if (fields.size() <= needed) {
      throw ParseError(line_no, "",
                       "line " + std::to_string(line_no) + " has " +
                           std::to_string(fields.size()) + " fields, need at least " +
                           std::to_string(needed + 1));
    }
    xs.push_back(parse_real(fields[xi], line_no, x_col));
    ys.push_back(parse_real(fields[yi], line_no, y_col));
    if (group_col) {
      const std::string g = trim(fields[gi]);
      int which = -1;
      for (int k = 0; k < labels_seen; ++k) {
        if (label[k] == g) which = k;
      }
      if (which < 0) {
        if (labels_seen == 2) {
          throw MoreThanTwoGroups("more than two distinct labels in column '" +
                                  *group_col + "' (line " + std::to_string(line_no) +
                                  ": '" + g + "')");
        }
        label[labels_seen] = g;
        which = labels_seen++;
      }
      groups.push_back(which);
    }
  }

  if (!group_col) {
    Dataset d;
    d.x = std::move(xs);
    d.y = std::move(ys);
    return d;
  }

  GroupedDataset g;
  for (int which : {0, 1}) {
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (groups[i] == which) {
        g.x.push_back(xs[i]);
        g.y.push_back(ys[i]);
      }
    }
    if (which == 0) g.n1 = static_cast<std::int64_t>(g.x.size());
  }
  return g;
}

namespace {

std::string fmt_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

void write_results_csv(const std::vector<RejectionEstimate>& rows,
                       const std::string& path) {
  std::ostringstream out;
  out << "tester,n,rho,delta,alpha,K,trials,reject_rate,stderr\n";
  for (const RejectionEstimate& r : rows) {
    out << r.tester << ',' << r.spec.n << ',' << fmt_real(r.rho) << ','
        << fmt_real(r.delta) << ',' << fmt_real(r.alpha) << ',' << r.K << ','
        << r.trials << ',' << fmt_real(r.rate) << ',' << fmt_real(r.std_err) << '\n';
  }

  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path + " for writing");
  f << out.str();
  f.flush();
  if (!f) throw IoError("write failed for " + path);
}

}  // namespace dplr
