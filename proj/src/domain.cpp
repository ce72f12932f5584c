#include "cwls/domain.hpp"

#include <cmath>
#include <sstream>

#include "cwls/errors.hpp"

namespace cwls {

namespace {

void check_dim(int d) {
  if (d < 1) throw ConfigError("domain dimension must be >= 1");
}

constexpr double kPi = 3.14159265358979323846;

}  // namespace

Domain cube_domain(int d) {
  check_dim(d);
  Domain dom;
  dom.d = d;
  dom.name = "cube";
  dom.indicator = [](const Eigen::VectorXd&) { return true; };
  dom.nominal_fraction = 1.0;
  return dom;
}

Domain annulus_domain(int d, double r_min, double r_max) {
  check_dim(d);
  if (!(r_min > 0.0 && r_min <= 1.0) || !(r_max > 0.0 && r_max <= 1.0))
    throw ConfigError("annulus radii must lie in (0, 1]");
  if (r_min >= r_max) throw ConfigError("annulus needs r_min < r_max");
  Domain dom;
  dom.d = d;
  std::ostringstream name;
  name << "annulus(" << r_min << "," << r_max << ")";
  dom.name = name.str();
  dom.indicator = [r_min, r_max](const Eigen::VectorXd& y) {
    const double r = y.norm();
    return r >= r_min && r <= r_max;
  };
  if (d == 2)
    dom.nominal_fraction = kPi * (r_max * r_max - r_min * r_min) / 4.0;
  return dom;
}

Domain halfspace_cut_cube(int d) {
  check_dim(d);
  Domain dom;
  dom.d = d;
  dom.name = "halfspace";
  dom.indicator = [](const Eigen::VectorXd& y) {
    return y.lpNorm<Eigen::Infinity>() < 1.0 && y.sum() <= 1.0;
  };
  if (d == 2) dom.nominal_fraction = 7.0 / 8.0;
  return dom;
}

Domain cylinder_complement(int d, double r) {
  check_dim(d);
  if (d < 2) throw ConfigError("cylinder_complement needs d >= 2");
  if (!(r > 0.0 && r <= 1.0)) throw ConfigError("cylinder radius must lie in (0, 1]");
  Domain dom;
  dom.d = d;
  std::ostringstream name;
  name << "cylcomp(" << r << ")";
  dom.name = name.str();
  dom.indicator = [r](const Eigen::VectorXd& y) {
    return y.lpNorm<Eigen::Infinity>() < 1.0 &&
           y(0) * y(0) + y(1) * y(1) >= r * r;
  };
  if (d == 2) dom.nominal_fraction = (4.0 - kPi * r * r) / 4.0;
  return dom;
}

Domain builtin_domain(const std::string& name, int d,
                      const std::map<std::string, double>& params) {
  auto get = [&params](const std::string& key, double fallback) {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
  };
  if (name == "cube") return cube_domain(d);
  if (name == "annulus")
    return annulus_domain(d, get("rmin", 0.25), get("rmax", 1.0));
  if (name == "halfspace" || name == "halfspace_cut_cube")
    return halfspace_cut_cube(d);
  if (name == "cylcomp" || name == "cylinder_complement")
    return cylinder_complement(d, get("r", 0.5));
  throw ConfigError("unknown domain '" + name + "'");
}

namespace {

Domain combine(Domain a, Domain b, const std::string& op) {
  if (a.d != b.d) throw ConfigError("combined domains must share a dimension");
  Domain dom;
  dom.d = a.d;
  dom.name = op + "(" + a.name + ";" + b.name + ")";
  auto ia = a.indicator;
  auto ib = b.indicator;
  if (op == "intersect")
    dom.indicator = [ia, ib](const Eigen::VectorXd& y) { return ia(y) && ib(y); };
  else if (op == "union")
    dom.indicator = [ia, ib](const Eigen::VectorXd& y) { return ia(y) || ib(y); };
  else
    dom.indicator = [ia, ib](const Eigen::VectorXd& y) { return ia(y) && !ib(y); };
  return dom;
}

}  // namespace

Domain domain_intersect(Domain a, Domain b) { return combine(std::move(a), std::move(b), "intersect"); }
Domain domain_union(Domain a, Domain b) { return combine(std::move(a), std::move(b), "union"); }
Domain domain_minus(Domain a, Domain b) { return combine(std::move(a), std::move(b), "minus"); }

namespace {

// Split "a;b" at the top-level semicolon (not inside nested parentheses).
std::pair<std::string, std::string> split_args(const std::string& s,
                                               const std::string& spec) {
  int depth = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '(') ++depth;
    else if (s[i] == ')') --depth;
    else if (s[i] == ';' && depth == 0)
      return {s.substr(0, i), s.substr(i + 1)};
  }
  throw ConfigError("combinator in '" + spec + "' needs two ';'-separated arguments");
}

}  // namespace

Domain parse_domain(const std::string& spec, int d) {
  for (const std::string op : {"intersect", "union", "minus"}) {
    if (spec.rfind(op + "(", 0) == 0 && spec.back() == ')') {
      const std::string inner = spec.substr(op.size() + 1, spec.size() - op.size() - 2);
      auto [lhs, rhs] = split_args(inner, spec);
      return combine(parse_domain(lhs, d), parse_domain(rhs, d), op);
    }
  }
  const auto colon = spec.find(':');
  const std::string name = spec.substr(0, colon);
  std::map<std::string, double> params;
  if (colon != std::string::npos) {
    std::stringstream ss(spec.substr(colon + 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto eq = item.find('=');
      if (eq == std::string::npos)
        throw ConfigError("domain parameter '" + item + "' needs key=value");
      try {
        params[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
      } catch (const std::invalid_argument&) {
        throw ConfigError("bad numeric value in domain spec '" + spec + "'");
      }
    }
  }
  return builtin_domain(name, d, params);
}

Eigen::MatrixXd sample_uniform(const Domain& domain, int count, RngStream& rng,
                               int max_attempts_per_point) {
  if (count < 1) throw ConfigError("sample count must be >= 1");
  if (max_attempts_per_point < 1)
    throw ConfigError("max_attempts_per_point must be >= 1");
  Eigen::MatrixXd points(count, domain.d);
  Eigen::VectorXd candidate(domain.d);
  long long attempts = 0;
  for (int i = 0; i < count; ++i) {
    int tries = 0;
    for (;;) {
      if (tries == max_attempts_per_point) {
        const double rate =
            attempts > 0 ? static_cast<double>(i) / static_cast<double>(attempts) : 0.0;
        std::ostringstream msg;
        msg << "rejection sampling on '" << domain.name << "' exhausted "
            << max_attempts_per_point << " attempts for point " << i
            << " (empirical acceptance rate " << rate << ")";
        throw SamplingError(msg.str(), rate);
      }
      for (int k = 0; k < domain.d; ++k) candidate(k) = rng.uniform_pm1();
      ++tries;
      ++attempts;
      if (domain.indicator(candidate)) break;
    }
    points.row(i) = candidate;
  }
  return points;
}

}  // namespace cwls
