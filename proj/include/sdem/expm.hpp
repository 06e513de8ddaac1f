#pragma once
// Matrix exponential by scaling and squaring with the [13/13] Pade approximant.

#include <Eigen/Dense>

#include <cmath>

#include "sdem/rational.hpp"

namespace sdem {

class NumericOverflow : public Error {
public:
    using Error::Error;
};

/// exp(A). The matrix is scaled by 2^-s so that ||A||_1 / 2^s <= 1/2, the
/// Pade approximant is evaluated, and the result is squared s times.
inline Eigen::MatrixXd expm(const Eigen::MatrixXd& a) {
    using Eigen::MatrixXd;
    const Eigen::Index n = a.rows();
    if (n != a.cols()) throw Error("expm: matrix must be square");
    if (n == 0) return a;
    if (!a.allFinite()) throw NumericOverflow("expm: input matrix is not finite");

    static constexpr double b[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                                   1187353796428800.0,  129060195264000.0,   10559470521600.0,
                                   670442572800.0,      33522128640.0,       1323241920.0,
                                   40840800.0,          960960.0,            16380.0,
                                   182.0,               1.0};

    const double norm = a.cwiseAbs().colwise().sum().maxCoeff();
    int s = 0;
    if (norm > 0.5) s = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
    if (s > 1000) throw NumericOverflow("expm: ||A t|| too large for double precision");
    const MatrixXd as = a * std::ldexp(1.0, -s);

    const MatrixXd id = MatrixXd::Identity(n, n);
    const MatrixXd a2 = as * as;
    const MatrixXd a4 = a2 * a2;
    const MatrixXd a6 = a4 * a2;
    const MatrixXd u =
        as * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id);
    const MatrixXd v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
    MatrixXd r = (v - u).partialPivLu().solve(v + u);
    for (int k = 0; k < s; ++k) r = r * r;
    if (!r.allFinite()) throw NumericOverflow("expm: result overflowed double precision");
    return r;
}

}  // namespace sdem
