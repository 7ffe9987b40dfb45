#include "twistmap/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>
#include <vector>

#include "twistmap/errors.hpp"

namespace twistmap {

void QuadConfig::validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
        throw DomainError("QuadConfig: tolerances must be positive");
    if (max_subdivisions < 1)
        throw DomainError("QuadConfig: max_subdivisions must be at least 1");
    if (!(alpha_cap > 0.0) || !(alpha_cap < std::numbers::pi / 2))
        throw DomainError("QuadConfig: alpha_cap must lie in (0, pi/2)");
}

namespace {

// Abscissae and weights of the QUADPACK qk21 rule.
constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};

constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077208801939982, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};

constexpr std::array<double, 5> kWg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Segment {
    double a;
    double b;
    double value;
    double error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

Segment qk21(const std::function<double(double)>& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double resg = 0.0;
    double resk = kWgk[10] * fc;
    double resabs = std::abs(resk);
    std::array<double, 10> fv1{};
    std::array<double, 10> fv2{};
    for (int j = 0; j < 5; ++j) {
        const int jtw = 2 * j + 1;
        const double dx = half * kXgk[jtw];
        const double f1 = f(center - dx);
        const double f2 = f(center + dx);
        fv1[jtw] = f1;
        fv2[jtw] = f2;
        resg += kWg[j] * (f1 + f2);
        resk += kWgk[jtw] * (f1 + f2);
        resabs += kWgk[jtw] * (std::abs(f1) + std::abs(f2));
    }
    for (int j = 0; j < 5; ++j) {
        const int jtwm1 = 2 * j;
        const double dx = half * kXgk[jtwm1];
        const double f1 = f(center - dx);
        const double f2 = f(center + dx);
        fv1[jtwm1] = f1;
        fv2[jtwm1] = f2;
        resk += kWgk[jtwm1] * (f1 + f2);
        resabs += kWgk[jtwm1] * (std::abs(f1) + std::abs(f2));
    }
    const double reskh = 0.5 * resk;
    double resasc = kWgk[10] * std::abs(fc - reskh);
    for (int j = 0; j < 10; ++j)
        resasc += kWgk[j] * (std::abs(fv1[j] - reskh) + std::abs(fv2[j] - reskh));

    const double result = resk * half;
    resabs *= std::abs(half);
    resasc *= std::abs(half);
    double err = std::abs((resk - resg) * half);
    if (resasc != 0.0 && err != 0.0)
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    constexpr double eps = std::numeric_limits<double>::epsilon();
    if (resabs > std::numeric_limits<double>::min() / (50.0 * eps))
        err = std::max(50.0 * eps * resabs, err);
    return {a, b, result, err};
}

}  // namespace

QuadResult integrate_gk21(const std::function<double(double)>& f, double a, double b,
                          const QuadConfig& cfg) {
    if (a == b)
        return {};
    std::priority_queue<Segment> heap;
    Segment first = qk21(f, a, b);
    double total = first.value;
    double total_err = first.error;
    heap.push(first);
    int count = 1;
    auto converged = [&] {
        return total_err <= std::max(cfg.abs_tol, cfg.rel_tol * std::abs(total));
    };
    while (!converged()) {
        if (count >= cfg.max_subdivisions) {
            std::ostringstream msg;
            msg << "adaptive quadrature on [" << a << ", " << b << "] did not converge in "
                << cfg.max_subdivisions << " subdivisions (error estimate " << total_err << ")";
            throw AccuracyError(msg.str());
        }
        const Segment worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            throw AccuracyError("adaptive quadrature: interval collapsed to machine resolution");
        }
        const Segment left = qk21(f, worst.a, mid);
        const Segment right = qk21(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++count;
    }
    // Re-sum to shed the drift of the running updates.
    double sum = 0.0;
    double sum_err = 0.0;
    while (!heap.empty()) {
        sum += heap.top().value;
        sum_err += heap.top().error;
        heap.pop();
    }
    return {sum, sum_err, count};
}

}  // namespace twistmap
