#pragma once
// Infinitesimal generator of a polynomial SDE,
//   A f = sum_i b_i d_i f + 1/2 sum_{i,j} (sigma sigma^T)_ij d_i d_j f,
// applied symbolically to monomials.

#include <map>
#include <vector>

#include "sdem/model.hpp"

namespace sdem {

using PolyMatrix = std::vector<std::vector<Polynomial>>;

/// (sigma sigma^T)_ij = sum_k sigma_ik sigma_jk. Symmetric by construction.
inline PolyMatrix diffusion_product(const SdeModel& model) {
    const std::size_t n = model.dim();
    PolyMatrix d(n, std::vector<Polynomial>(n, Polynomial(n)));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < model.brownian_dim; ++k)
                d[i][j] += model.diffusion[i][k] * model.diffusion[j][k];
    return d;
}

/// A(x^beta) split as sum_gamma a_gamma x^gamma + c with gamma != 0.
struct GeneratorImage {
    std::map<Monomial, Rational, GrlexLess> linear_part;
    Rational constant = 0;

    Polynomial to_polynomial(std::size_t dim) const {
        Polynomial p = Polynomial::constant(dim, constant);
        for (const auto& [m, c] : linear_part) p.add_term(m, c);
        return p;
    }

    static GeneratorImage split(const Polynomial& p) {
        GeneratorImage img;
        for (const auto& [m, c] : p.terms()) {
            if (m.is_constant()) {
                img.constant = c;
            } else {
                img.linear_part.emplace(m, c);
            }
        }
        return img;
    }
};

/// Applies the generator of one model. Holds sigma sigma^T, computed once at
/// construction; apply() is const and safe to call from several threads.
class Generator {
public:
    explicit Generator(SdeModel model) : model_(std::move(model)), sst_(sdem::diffusion_product(model_)) {}

    const SdeModel& model() const { return model_; }
    const PolyMatrix& diffusion_product() const { return sst_; }

    Polynomial apply_polynomial(const Monomial& beta) const {
        const std::size_t n = model_.dim();
        if (beta.dim() != n) throw Error("generator: multi-index " + beta.to_tuple() + " has wrong dimension");
        Polynomial r(n);
        for (std::size_t i = 0; i < n; ++i) {
            if (beta[i] == 0) continue;
            Monomial d = beta;
            d[i] -= 1;
            r += model_.drift[i].times_monomial(d, beta[i]);
        }
        const Rational half(1, 2);
        // all ordered pairs (i, j); the off-diagonal pairs appear twice
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                if (sst_[i][j].is_zero()) continue;
                Monomial d = beta;
                Rational c;
                if (i == j) {
                    if (beta[i] < 2) continue;
                    c = half * beta[i] * (beta[i] - 1);
                    d[i] -= 2;
                } else {
                    if (beta[i] == 0 || beta[j] == 0) continue;
                    c = half * beta[i] * beta[j];
                    d[i] -= 1;
                    d[j] -= 1;
                }
                r += sst_[i][j].times_monomial(d, c);
            }
        }
        return r;
    }

    GeneratorImage apply(const Monomial& beta) const { return GeneratorImage::split(apply_polynomial(beta)); }

    /// Extension by linearity to an arbitrary polynomial.
    Polynomial apply(const Polynomial& p) const {
        Polynomial r(model_.dim());
        for (const auto& [m, c] : p.terms()) r += apply_polynomial(m) * c;
        return r;
    }

private:
    SdeModel model_;
    PolyMatrix sst_;
};

inline GeneratorImage apply_generator(const SdeModel& model, const Monomial& beta) {
    return Generator(model).apply(beta);
}

}  // namespace sdem
