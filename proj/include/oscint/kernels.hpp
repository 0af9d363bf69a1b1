#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

namespace oscint {

// Singular power-law kernel K(z) = amplitude * |z|^-p, optionally multiplied
// by a degree-0 homogeneous angular factor omega(z) that vanishes where
// |z_last| / |z| <= c1 (smooth transition, identically 1 for ratios >= 2*c1).
//
// The regularity gain m is carried alongside p; the homogeneity bound
// |D^a K(z)| <~ |z|^(m - (p+m) - |a|) is normalized with n := p + m, which in
// both operator settings used here equals ambient_dim - 1.
struct AngularCutoff {
  double c1 = 0.2;  // > 0
};

struct KernelSpec {
  int ambient_dim = 2;          // dimension of the argument z
  double p = 1.0;               // decay exponent, 0 < p <= ambient_dim - 1
  double m = 0.0;               // regularity gain, 0 <= m < ambient_dim - 1
  double amplitude = 1.0;
  std::optional<AngularCutoff> angular_cutoff{};
};

void validate(const KernelSpec& k);

// K(z).  Throws std::domain_error at z = 0 (or |z| = 0).
double kernel_eval(const KernelSpec& k, std::span<const double> z);

// |D^alpha K(z)| * |z|^(p + |alpha|), the homogeneity-normalized derivative
// ratio.  Derivatives are central finite differences with step h = 1e-4 |z|.
// Requires |alpha| <= 2.
double a2_ratio(const KernelSpec& k, std::span<const double> z,
                std::span<const int> alpha);

// C-infinity step: 0 for t <= 0, 1 for t >= 1, built from exp(-1/t).
// Satisfies smoothstep(t) + smoothstep(1-t) == 1 exactly.
double smoothstep(double t);

// Radial shell cutoff eta: 1 on |t| <= 1, 0 on |t| >= 2.
double eta_shell(double r);

// Complementary annulus cutoff phi = 1 - eta: 0 on |t| <= 1, 1 on |t| >= 2.
double phi_annulus(double r);

// Mollified unit partition bump: indicator of [-1/2, 1/2] convolved with a
// normalized bump of radius 1/10.  Support in [-3/5, 3/5], and
// sum_j partition_bump(t - j) == 1 for every t.
double partition_bump(double t);

// Tensor-product plateau cutoff: identically 1 on the per-axis box
// [lo_i, hi_i], 0 outside [lo_i - margin, hi_i + margin], smooth between.
struct TensorBump {
  std::vector<std::array<double, 2>> box;  // plateau per axis
  double margin = 0.1;                     // > 0
};

void validate(const TensorBump& b);
double tensor_bump_eval(const TensorBump& b, std::span<const double> x);

// One cutoff vocabulary for config-driven evaluation.
enum class CutoffKind { EtaShell, PhiAnnulus, PartitionBump, TensorBump };

struct CutoffSpec {
  CutoffKind kind = CutoffKind::EtaShell;
  TensorBump bump{};  // used when kind == TensorBump
};

// Radial kinds accept a scalar (interpreted as |t|) or a point (|point|);
// PartitionBump takes the scalar directly; TensorBump needs a point whose
// dimension matches the configured box.
double cutoff_eval(const CutoffSpec& c, double t);
double cutoff_eval(const CutoffSpec& c, std::span<const double> x);

// Smooth dyadic piece psi(u) = amplitude |u|^-p omega(u) (eta(u) - eta(2u)),
// supported in 1/2 <= |u| <= 2.
double dyadic_piece(const KernelSpec& k, std::span<const double> u);

// sum_j 2^(j p) psi(2^j z) over the (at most 3) contributing j; telescopes
// back to kernel_eval(k, z) for z != 0.
double dyadic_reconstruct(const KernelSpec& k, std::span<const double> z);

}  // namespace oscint
