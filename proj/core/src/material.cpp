// SPDX-License-Identifier: Apache-2.0
#include "stresseq/material.hpp"

#include <cmath>

namespace stresseq {

KinematicState KinematicState::from_F(const Mat2& F, int element_hint) {
    double det = F.determinant();
    if (!(det > 0.0)) {
        std::string where =
            element_hint >= 0 ? " in element " + std::to_string(element_hint) : "";
        throw Error("NONPOSITIVE_DET", "det F = " + std::to_string(det) + where);
    }
    KinematicState k;
    k.F = F;
    k.det_F = det;
    Mat2 inv;
    inv << F(1, 1), -F(0, 1), -F(1, 0), F(0, 0);
    k.F_inv_T = inv.transpose() / det;
    return k;
}

double energy_nh(const Mat2& B, const MaterialParams& params) {
    double det = B.determinant();
    if (!(det > 0.0)) throw Error("NONPOSITIVE_DET", "det B = " + std::to_string(det));
    return 0.5 * (params.mu * B.trace() + 0.5 * params.lambda * det -
                  (params.mu + 0.5 * params.lambda) * std::log(det));
}

Mat2 piola_stress(const Mat2& F, const MaterialParams& params) {
    KinematicState k = KinematicState::from_F(F);
    double det_B = k.det_F * k.det_F;
    double coeff = 0.5 * params.lambda * (det_B - 1.0) - params.mu;
    return params.mu * F + coeff * k.F_inv_T;
}

Mat2 piola_stress_pressure(const Mat2& F, double p, const MaterialParams& params) {
    KinematicState k = KinematicState::from_F(F);
    double coeff = p * (1.0 + 0.5 * p * params.inv_lambda()) - params.mu;
    return params.mu * F + coeff * k.F_inv_T;
}

Mat2 piola_stress_tangent(const KinematicState& k, double p, double dp, const Mat2& dH,
                          const MaterialParams& params) {
    double coeff = p * (1.0 + 0.5 * p * params.inv_lambda()) - params.mu;
    double dcoeff = dp * (1.0 + p * params.inv_lambda());
    Mat2 dFinvT = -k.F_inv_T * dH.transpose() * k.F_inv_T;
    return params.mu * dH + dcoeff * k.F_inv_T + coeff * dFinvT;
}

} // namespace stresseq
