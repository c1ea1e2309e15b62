#pragma once
#include "varinv/mat.hpp"

namespace varinv {

/// Value and Jacobian of a map at a point, computed together (for flows the
/// two come out of the same integration, so splitting the interface would
/// double the work).
struct MapEval {
    Vec y;
    Mat grad;
};

class PointMap {
public:
    virtual ~PointMap() = default;
    virtual int dim() const = 0;
    virtual MapEval eval(const Vec& x) const = 0;
};

} // namespace varinv
