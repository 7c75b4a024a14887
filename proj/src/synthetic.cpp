#include "relml/synthetic.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "relml/error.hpp"
#include "relml/random.hpp"

namespace relml {

void SyntheticConfig::validate() const {
  if (!(correlation >= 0.0 && correlation <= 1.0))
    throw Error(ErrorCode::InvalidCorrelation, "link-label correlation must lie in [0, 1]");
  if (n_parents == 0 || n_children < 2)
    throw Error(ErrorCode::InvalidArgument, "synthetic data needs parents and at least 2 children");
  if (n_classes < 2 || n_classes > n_children)
    throw Error(ErrorCode::InvalidArgument, "class count must lie in [2, children]");
  if (alpha + beta == 0)
    throw Error(ErrorCode::InvalidArgument, "at least one association attribute is required");
  if (informative_dims + noise_dims == 0)
    throw Error(ErrorCode::InvalidArgument, "children need at least one feature");
  if (!(feature_noise >= 0.0 && noise_scale >= 0.0 && value_noise >= 0.0))
    throw Error(ErrorCode::InvalidArgument, "noise levels must be non-negative");
}

RelationalSchema generate_synthetic(const SyntheticConfig& config) {
  config.validate();
  const std::size_t n = config.n_children;
  const std::size_t np = config.n_parents;
  const std::size_t nc = config.n_classes;
  const double rho = config.correlation;

  Rng latent_rng(derive_seed(config.seed, "latent"));
  std::vector<double> t(n);
  for (auto& v : t) v = latent_rng.uniform01();
  std::vector<std::size_t> by_t(n);
  std::iota(by_t.begin(), by_t.end(), std::size_t{0});
  std::sort(by_t.begin(), by_t.end(), [&](std::size_t a, std::size_t b) { return t[a] < t[b] || (t[a] == t[b] && a < b); });
  std::vector<ClassId> labels(n);
  std::vector<std::vector<std::size_t>> members(nc);
  for (std::size_t r = 0; r < n; ++r) labels[by_t[r]] = static_cast<ClassId>(r * nc / n);
  for (std::size_t c = 0; c < n; ++c) members[static_cast<std::size_t>(labels[c])].push_back(c);

  Rng feature_rng(derive_seed(config.seed, "features"));
  const std::size_t d = config.informative_dims + config.noise_dims;
  FeatureMatrix x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (std::size_t c = 0; c < n; ++c) {
    const auto row = static_cast<Eigen::Index>(c);
    for (std::size_t k = 0; k < config.informative_dims; ++k)
      x(row, static_cast<Eigen::Index>(k)) = t[c] + config.feature_noise * feature_rng.normal();
    for (std::size_t k = config.informative_dims; k < d; ++k)
      x(row, static_cast<Eigen::Index>(k)) = config.noise_scale * feature_rng.normal();
  }
  for (Eigen::Index k = 0; k < x.cols(); ++k) {
    const double mean = x.col(k).mean();
    const double sd = std::sqrt((x.col(k).array() - mean).square().mean());
    x.col(k).array() -= mean;
    if (sd > 0.0) x.col(k) /= sd;
  }
  std::vector<std::string> feature_names;
  for (std::size_t k = 0; k < config.informative_dims; ++k) feature_names.push_back("signal" + std::to_string(k));
  for (std::size_t k = 0; k < config.noise_dims; ++k) feature_names.push_back("noise" + std::to_string(k));

  std::vector<std::string> child_ids, parent_ids, class_names;
  for (std::size_t c = 0; c < n; ++c) child_ids.push_back("child" + std::to_string(c));
  for (std::size_t p = 0; p < np; ++p) parent_ids.push_back("parent" + std::to_string(p));
  for (std::size_t k = 0; k < nc; ++k) class_names.push_back("class" + std::to_string(k));

  FeatureMatrix parent_x(static_cast<Eigen::Index>(np), 1);
  for (std::size_t p = 0; p < np; ++p)
    parent_x(static_cast<Eigen::Index>(p), 0) = static_cast<double>(p % nc);

  std::vector<std::string> numeric_names, categorical_names;
  for (std::size_t m = 0; m < config.alpha; ++m) numeric_names.push_back("value" + std::to_string(m));
  for (std::size_t m = 0; m < config.beta; ++m) categorical_names.push_back("kind" + std::to_string(m));

  RelationalSchema schema{
      {EntityTable("Parent", parent_ids, std::move(parent_x), std::nullopt, {"home"}),
       EntityTable("Child", child_ids, std::move(x), labels, feature_names, class_names)},
      AssociationTable("Link", "Parent", "Child", numeric_names, categorical_names)};

  Rng link_rng(derive_seed(config.seed, "links"));
  Rng value_rng(derive_seed(config.seed, "values"));
  std::vector<double> numeric(config.alpha);
  std::vector<std::string> categorical(config.beta);
  std::vector<std::size_t> coding(nc);
  for (std::size_t p = 0; p < np; ++p) {
    const auto& home = members[p % nc];
    const std::size_t cap = rho >= 1.0 ? home.size() : n;
    const std::size_t want = std::min(config.links_per_parent, cap);
    std::vector<std::size_t> chosen;
    std::unordered_set<std::size_t> seen;
    const std::size_t h = p % nc;
    while (chosen.size() < want) {
      std::size_t c;
      if (link_rng.bernoulli(rho)) {
        c = home[link_rng.uniform_index(home.size())];
      } else if (link_rng.bernoulli(rho)) {
        std::size_t k = h == 0 ? 1 : h == nc - 1 ? nc - 2 : (link_rng.bernoulli(0.5) ? h - 1 : h + 1);
        const auto& near = members[k];
        c = near[link_rng.uniform_index(near.size())];
      } else {
        c = static_cast<std::size_t>(link_rng.uniform_index(n));
      }
      if (seen.insert(c).second) chosen.push_back(c);
    }
    std::vector<std::vector<std::size_t>> codings(config.beta);
    for (auto& cd : codings) {
      cd.resize(nc);
      std::iota(cd.begin(), cd.end(), std::size_t{0});
      value_rng.shuffle(std::span(cd));
    }
    for (std::size_t c : chosen) {
      for (auto& v : numeric) {
        if (value_rng.bernoulli(rho))
          v = std::clamp(t[c] + config.value_noise * value_rng.normal(), 0.0, 1.0);
        else
          v = value_rng.uniform01();
      }
      for (std::size_t m = 0; m < config.beta; ++m) {
        const std::size_t level = value_rng.bernoulli(rho)
                                      ? codings[m][static_cast<std::size_t>(labels[c])]
                                      : static_cast<std::size_t>(value_rng.uniform_index(nc));
        categorical[m] = "k" + std::to_string(level);
      }
      schema.association.add_row(p, c, numeric, categorical);
    }
  }
  schema.validate();
  return schema;
}

namespace {

template <typename T>
T parse_value(std::string_view key, std::string_view text) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end)
    throw Error(ErrorCode::InvalidArgument,
                "synthetic parameter " + std::string(key) + ": cannot parse '" + std::string(text) + "'");
  return value;
}

}  // namespace

SyntheticConfig parse_synthetic_spec(std::string_view spec) {
  SyntheticConfig config;
  if (spec.empty() || spec == "default") return config;
  std::size_t start = 0;
  while (start <= spec.size()) {
    const std::size_t comma = std::min(spec.find(',', start), spec.size());
    const auto item = spec.substr(start, comma - start);
    start = comma + 1;
    if (item.empty()) continue;
    if (item == "default") continue;
    const auto eq = item.find('=');
    if (eq == std::string_view::npos)
      throw Error(ErrorCode::InvalidArgument, "synthetic parameter '" + std::string(item) + "' needs key=value");
    const auto key = item.substr(0, eq);
    const auto val = item.substr(eq + 1);
    if (key == "parents") config.n_parents = parse_value<std::size_t>(key, val);
    else if (key == "children") config.n_children = parse_value<std::size_t>(key, val);
    else if (key == "classes") config.n_classes = parse_value<std::size_t>(key, val);
    else if (key == "rho") config.correlation = parse_value<double>(key, val);
    else if (key == "alpha") config.alpha = parse_value<std::size_t>(key, val);
    else if (key == "beta") config.beta = parse_value<std::size_t>(key, val);
    else if (key == "links") config.links_per_parent = parse_value<std::size_t>(key, val);
    else if (key == "informative") config.informative_dims = parse_value<std::size_t>(key, val);
    else if (key == "noise_dims") config.noise_dims = parse_value<std::size_t>(key, val);
    else if (key == "feature_noise") config.feature_noise = parse_value<double>(key, val);
    else if (key == "noise_scale") config.noise_scale = parse_value<double>(key, val);
    else if (key == "value_noise") config.value_noise = parse_value<double>(key, val);
    else if (key == "seed") config.seed = parse_value<std::uint64_t>(key, val);
    else throw Error(ErrorCode::InvalidArgument, "unknown synthetic parameter '" + std::string(key) + "'");
  }
  config.validate();
  return config;
}

std::string describe(const SyntheticConfig& c) {
  std::ostringstream out;
  out << "parents=" << c.n_parents << ",children=" << c.n_children << ",classes=" << c.n_classes
      << ",rho=" << c.correlation << ",alpha=" << c.alpha << ",beta=" << c.beta
      << ",links=" << c.links_per_parent << ",informative=" << c.informative_dims
      << ",noise_dims=" << c.noise_dims << ",feature_noise=" << c.feature_noise
      << ",noise_scale=" << c.noise_scale << ",value_noise=" << c.value_noise << ",seed=" << c.seed;
  return out.str();
}

}  // namespace relml
