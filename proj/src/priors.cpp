#include "ebreg/priors.hpp"

#include "ebreg/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace ebreg {

namespace {

template <class... Ts> struct overloaded : Ts... { using Ts::operator()...; };
template <class... Ts> overloaded(Ts...) -> overloaded<Ts...>;

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

}  // namespace

ModelPrior::ModelPrior(PriorFamily family, Index p, Index R) : family_(std::move(family)), p_(p), R_(R) {
  if (p_ < 1) throw ValidationError("prior needs p >= 1");
  if (R_ < 0 || R_ > p_) throw ValidationError("rank bound must lie in [0, p]");

  log_mass_.assign(static_cast<std::size_t>(R_ + 1), kNegInf);
  const double Rd = static_cast<double>(R_);

  std::visit(
      overloaded{
          [&](const Complexity& f) {
            if (!(f.a > 0) || !(f.c > 0)) throw ValidationError("complexity prior needs a > 0 and c > 0");
            const double slope = -(std::log(f.c) + f.a * std::log(static_cast<double>(p_)));
            std::vector<double> raw(log_mass_.size());
            for (std::size_t s = 0; s < raw.size(); ++s) raw[s] = slope * static_cast<double>(s);
            const double norm = log_sum_exp(raw);
            for (std::size_t s = 0; s < raw.size(); ++s) log_mass_[s] = raw[s] - norm;
          },
          [&](const BetaBinomial& f) {
            if (!(f.a > 0)) throw ValidationError("beta-binomial prior needs a > 0");
            const double an = f.a * Rd;
            if (R_ == 0) {
              log_mass_[0] = 0.0;
              return;
            }
            // f(s) = C(R,s) a_n B(R - s + a_n, s + 1)
            for (Index s = 0; s <= R_; ++s) {
              const double sd = static_cast<double>(s);
              log_mass_[s] = log_binomial(Rd, sd) + std::log(an) + log_gamma(Rd - sd + an) + log_gamma(sd + 1) -
                             log_gamma(Rd + an + 1);
            }
          },
          [&](const BinomialRinv&) {
            if (R_ == 0) {
              log_mass_[0] = 0.0;
              return;
            }
            const double prob = 1.0 / Rd;
            for (Index s = 0; s <= R_; ++s) {
              const double sd = static_cast<double>(s);
              const double fail = (R_ - s) == 0 ? 0.0 : (Rd - sd) * std::log1p(-prob);
              log_mass_[s] = log_binomial(Rd, sd) + sd * std::log(prob) + fail;
            }
          },
          [&](const Mixture& m) {
            if (!m.base) throw ValidationError("mixture prior needs a base prior");
            if (std::holds_alternative<Mixture>(m.base->family()))
              throw ValidationError("mixture base must not itself be a mixture");
            if (m.base->p() != p_ || m.base->rank_bound() != R_)
              throw ValidationError("mixture base must share p and R");
            if (!(m.r > 0)) throw ValidationError("mixture rate r must be positive");
            if (canonical(m.anchor) != m.anchor) throw ValidationError("mixture anchor must be sorted and unique");
            if (static_cast<Index>(m.anchor.size()) > R_) throw ValidationError("mixture anchor larger than R");
            for (int j : m.anchor)
              if (j < 0 || j >= p_) throw ValidationError("mixture anchor index out of range");
            const double log_w = -m.r * Rd;
            const double log_keep = std::log1p(-std::exp(log_w));
            for (Index s = 0; s <= R_; ++s) {
              double v = log_keep + m.base->log_size_mass(s);
              if (s == static_cast<Index>(m.anchor.size())) v = log_add(v, log_w);
              log_mass_[s] = v;
            }
          },
      },
      family_);
}

std::string ModelPrior::name() const {
  return std::visit(overloaded{[](const Complexity&) { return std::string("complexity"); },
                               [](const BetaBinomial&) { return std::string("betabinom"); },
                               [](const BinomialRinv&) { return std::string("binom"); },
                               [](const Mixture&) { return std::string("mixture"); }},
                    family_);
}

double ModelPrior::log_size_mass(Index s) const {
  if (s < 0 || s > R_) return kNegInf;
  return log_mass_[static_cast<std::size_t>(s)];
}

double ModelPrior::mixture_weight() const {
  if (const auto* m = std::get_if<Mixture>(&family_)) return std::exp(-m->r * static_cast<double>(R_));
  return 0.0;
}

double ModelPrior::log_model_prior(const Model& S) const {
  const Index s = static_cast<Index>(S.size());
  if (s > R_) return kNegInf;
  const double log_uniform = -log_binomial(static_cast<double>(p_), static_cast<double>(s));
  if (const auto* m = std::get_if<Mixture>(&family_)) {
    const double log_w = -m->r * static_cast<double>(R_);
    const double base = std::log1p(-std::exp(log_w)) + m->base->log_model_prior(S);
    return S == m->anchor ? log_add(base, log_w) : base;
  }
  return log_mass_[static_cast<std::size_t>(s)] + log_uniform;
}

Model spanning_anchor(const DesignMatrixd& X, Index R) {
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(X.n());
  ModelFitd fit = fit_model(X, zero, Model{});
  for (int j = 0; j < X.p() && fit.size() < R; ++j) {
    try {
      fit = extend_fit(fit, X, zero, j);
    } catch (const SingularModel&) {
    }
  }
  return fit.model;
}

ModelPrior default_prior(Index p, Index R) { return ModelPrior(Complexity{0.05, 1.0}, p, R); }

namespace {

PriorFamily simple_family(const std::string& name, const PriorSpec& spec) {
  if (name == "complexity") return Complexity{spec.a, spec.c};
  if (name == "betabinom") return BetaBinomial{spec.a};
  if (name == "binom") return BinomialRinv{};
  throw ValidationError("unknown prior family '" + name + "'");
}

}  // namespace

void PriorSpec::validate() const {
  const bool known = family == "complexity" || family == "betabinom" || family == "binom" || family == "mixture";
  if (!known) throw ValidationError("unknown prior family '" + family + "'");
  const std::string& inner = family == "mixture" ? base : family;
  if (inner == "mixture") throw ValidationError("mixture base must not itself be a mixture");
  if (inner != "complexity" && inner != "betabinom" && inner != "binom")
    throw ValidationError("unknown prior family '" + inner + "'");
  if ((inner == "complexity" || inner == "betabinom") && !(a > 0)) throw ValidationError("prior parameter a must be positive");
  if (inner == "complexity" && !(c > 0)) throw ValidationError("prior parameter c must be positive");
  if (family == "mixture" && !(r > 0)) throw ValidationError("mixture rate r must be positive");
}

ModelPrior make_prior(const PriorSpec& spec, const DesignMatrixd& X, Index R) {
  spec.validate();
  if (spec.family != "mixture") return ModelPrior(simple_family(spec.family, spec), X.p(), R);
  auto base = std::make_shared<const ModelPrior>(simple_family(spec.base, spec), X.p(), R);
  return ModelPrior(Mixture{std::move(base), spec.r, spanning_anchor(X, R)}, X.p(), R);
}

ModelPrior make_prior(const PriorSpec& spec, Index p, Index R) {
  spec.validate();
  if (spec.family != "mixture") return ModelPrior(simple_family(spec.family, spec), p, R);
  auto base = std::make_shared<const ModelPrior>(simple_family(spec.base, spec), p, R);
  Model anchor(static_cast<std::size_t>(std::max<Index>(0, std::min(R, p))));
  for (std::size_t k = 0; k < anchor.size(); ++k) anchor[k] = static_cast<int>(k);
  return ModelPrior(Mixture{std::move(base), spec.r, std::move(anchor)}, p, R);
}

}  // namespace ebreg
