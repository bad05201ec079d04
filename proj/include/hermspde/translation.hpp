#pragma once

#include <vector>

#include "hermspde/spectral_element.hpp"

namespace hermspde {

enum class TranslationMethod { quadrature, exponential };

struct TranslationOptions {
    TranslationMethod method = TranslationMethod::quadrature;
    double x_max = 50.0;  // guard on |x|
    int pad = 16;         // degree padding for the exponential method
};

/// Quadrature order used by the reprojection method for a shift of size |x|.
int translation_quadrature_order(int N, double x_norm);

/// Coefficients of y |-> u(y - x).
///
/// Method "quadrature" reprojects through the cross-Gram
/// T_kj(x) = int h_j(y-x) h_k(y) dy, evaluated with the e^{-v^2} rule of
/// order N + 8 + ceil(|x|^2) after centering (y = v + x/2). The seeded
/// Hermite recurrence keeps every intermediate representable at large |x|.
///
/// Method "exponential" applies exp(-sum_i x_i D_i) on a scheme padded to
/// N + pad, then restricts; it is the independent cross-check, mirroring
/// tau_x = exp(-x . d).
///
/// translate(u, 0) returns u unchanged under either method.
SpectralElement translate(const SpectralElement& u, const std::vector<double>& x,
                          const TranslationOptions& opts = {});

/// Direct-kernel shortcut for <w, tau_z u> = int w(v) u(v - z) dv, without
/// building the translated coefficients.
double translate_pairing(const SpectralElement& w, const SpectralElement& u,
                         const std::vector<double>& z);

}  // namespace hermspde
