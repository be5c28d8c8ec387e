#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace cq {

enum class Fault { none, cf_kernel_x2 };

struct SelfCheckOptions {
    Fault fault = Fault::none;
    std::uint64_t seed = 20240601;
};

struct FamilyResult {
    std::string name;
    bool passed = false;
    int cases = 0;
    double worst = 0.0;  // largest observed error (or mismatch count)
    double tolerance = 0.0;
    double elapsed_ms = 0.0;
    std::string detail;
};

FamilyResult check_mincut(const SelfCheckOptions& opt);
FamilyResult check_cfd_quadrature(const SelfCheckOptions& opt);
FamilyResult check_varda_quadrature(const SelfCheckOptions& opt);
FamilyResult check_dtm_bruteforce(const SelfCheckOptions& opt);
FamilyResult check_gradients(const SelfCheckOptions& opt);
FamilyResult check_metrics(const SelfCheckOptions& opt);

std::vector<FamilyResult> run_selfcheck(const SelfCheckOptions& opt = {});

}  // namespace cq
