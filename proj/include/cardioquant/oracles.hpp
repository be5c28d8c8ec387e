#pragma once

// Slow reference implementations used by the test suites and `selfcheck`.
// None of them call into the code paths they are used to verify.

#include "cardioquant/discrepancy.hpp"
#include "cardioquant/scargraph.hpp"
#include "cardioquant/segmetrics.hpp"
#include "cardioquant/volume.hpp"

#include <functional>
#include <utility>

namespace cq::oracle {

// Adaptive Simpson on [lo, hi] split into `panels` equal sub-intervals.
double integrate(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-12, int panels = 64);

// Energy evaluated straight from the definition.
double energy(const SurfaceGraph& g, const Labeling& l);

// Minimum over all 2^n labelings (n <= 24).
std::pair<Labeling, double> min_energy_by_enumeration(const SurfaceGraph& g);

// Integral over [-a, a]^n of |phi_S - phi_T|^2, n in {1, 2}.
double cfd_by_quadrature(const FeatureBatch& zs, const FeatureBatch& zt, double a);

// Integral of N(z; us, ls) N(z; ut, lt) over the real line (1-D).
double gaussian_overlap_by_quadrature(double us, double ls, double ut, double lt);

// Integral of (q_S(z) - q_T(z))^2 for 1-D equal-weight Gaussian mixtures.
double mixture_l2_by_quadrature(const GaussianBatch& qs, const GaussianBatch& qt);

// Signed distance by scanning every boundary voxel for every voxel.
Volume signed_dtm_brute(const Volume& mask, double beta = 1.0);

double hausdorff_brute(const PointSet& x, const PointSet& y);
double asd_brute(const PointSet& x, const PointSet& y);
double dice_brute(const Volume& a, const Volume& b, int label);
double gdice_brute(const Volume& a, const Volume& b, const std::vector<int>& labels);

// Exhaustive between-class variance over the candidate edges lo + k (hi - lo) / bins.
double otsu_by_scan(std::span<const double> values, int bins);

}  // namespace cq::oracle
