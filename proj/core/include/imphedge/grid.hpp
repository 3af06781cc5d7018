#pragma once

#include "imphedge/errors.hpp"

namespace imphedge {

/// Uniform (t, s, y) lattice: nt nodes on [0, t_max], ns on [s_min, s_max],
/// ny on [y_min, y_max].
struct Grid {
    int nt = 2000;
    int ns = 201;
    int ny = 81;
    double t_max = 0.5;
    double s_min = 0.0;
    double s_max = 200.0;
    double y_min = -20.0;
    double y_max = 20.0;

    double dt() const { return t_max / (nt - 1); }
    double ds() const { return (s_max - s_min) / (ns - 1); }
    double dy() const { return (y_max - y_min) / (ny - 1); }
    double t(int i) const { return t_max * i / (nt - 1); }
    double s(int j) const { return s_min + ds() * j; }
    double y(int k) const { return y_min + dy() * k; }

    void validate() const {
        if (nt < 3 || ns < 3 || ny < 3)
            throw ConfigError("Grid: nt, ns, ny must all be >= 3");
        if (!(s_min >= 0.0) || !(s_max > s_min))
            throw ConfigError("Grid: need 0 <= s_min < s_max");
        if (!(y_max > y_min)) throw ConfigError("Grid: need y_min < y_max");
        if (!(t_max > 0.0)) throw ConfigError("Grid: need t_max > 0");
    }

    bool same_lattice(const Grid& o) const {
        return nt == o.nt && ns == o.ns && ny == o.ny && t_max == o.t_max &&
               s_min == o.s_min && s_max == o.s_max && y_min == o.y_min &&
               y_max == o.y_max;
    }
};

} // namespace imphedge
