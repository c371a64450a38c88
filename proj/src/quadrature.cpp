#include "rjmix/quadrature.hpp"

#include <cmath>
#include <utility>
#include <vector>

#include "rjmix/errors.hpp"

namespace rjmix {

namespace {

// Gauss-Kronrod 15-point nodes/weights on [-1, 1]; odd entries form the
// embedded 7-point Gauss rule.
constexpr double kNodes[15] = {
    -0.991455371120812639206854697526, -0.949107912342758524526189684048,
    -0.864864423359769072789712788641, -0.741531185599394439863864773281,
    -0.586087235467691130294144838259, -0.405845151377397166906606412077,
    -0.207784955007898467600689403773, 0.0,
    0.207784955007898467600689403773,  0.405845151377397166906606412077,
    0.586087235467691130294144838259,  0.741531185599394439863864773281,
    0.864864423359769072789712788641,  0.949107912342758524526189684048,
    0.991455371120812639206854697526};
constexpr double kKronrodWeights[15] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
    0.204432940075298892414161999234649, 0.190350578064785409913256402421014,
    0.169004726639267902826583426598550, 0.140653259715525918745189590510238,
    0.104790010322250183839876322541518, 0.063092092629978553290700663189204,
    0.022935322010529224963732008058970};
constexpr double kGaussWeights[7] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
    0.381830050505118944950369775488975, 0.279705391489276667901467771423780,
    0.129484966168869693270611432679082};

struct PanelResult {
    double integral;
    double error;
};

PanelResult gk15(const std::function<double(double)>& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double kronrod = 0.0, gauss = 0.0;
    for (int i = 0; i < 15; ++i) {
        const double fx = f(center + half * kNodes[i]);
        kronrod += kKronrodWeights[i] * fx;
        if (i % 2 == 1) gauss += kGaussWeights[i / 2] * fx;
    }
    kronrod *= half;
    gauss *= half;
    return {kronrod, std::fabs(kronrod - gauss)};
}

}  // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double abs_tol, double rel_tol) {
    if (!(b > a)) return 0.0;
    struct Panel {
        double a, b, integral, error;
    };
    PanelResult first = gk15(f, a, b);
    std::vector<Panel> active{{a, b, first.integral, first.error}};
    double total = first.integral;
    double total_error = first.error;
    int splits = 0;
    const int max_splits = 20000;
    while (total_error > abs_tol + rel_tol * std::fabs(total)) {
        if (++splits > max_splits)
            throw integration_error("integrate_adaptive: subdivision budget exhausted");
        // Split the panel with the largest error estimate.
        std::size_t worst = 0;
        for (std::size_t i = 1; i < active.size(); ++i)
            if (active[i].error > active[worst].error) worst = i;
        const Panel panel = active[worst];
        const double mid = 0.5 * (panel.a + panel.b);
        if (mid <= panel.a || mid >= panel.b)
            throw integration_error("integrate_adaptive: interval too small to split");
        PanelResult left = gk15(f, panel.a, mid);
        PanelResult right = gk15(f, mid, panel.b);
        total += left.integral + right.integral - panel.integral;
        total_error += left.error + right.error - panel.error;
        active[worst] = {panel.a, mid, left.integral, left.error};
        active.push_back({mid, panel.b, right.integral, right.error});
    }
    return total;
}

}  // namespace rjmix
