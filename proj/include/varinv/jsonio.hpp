#pragma once
#include <stdexcept>
#include <string>

#include "varinv/mat.hpp"

#include "json.hpp"

namespace varinv {

inline nlohmann::json vec_to_json(const Vec& v) {
    nlohmann::json j = nlohmann::json::array();
    for (int i = 0; i < v.dim(); ++i) j.push_back(v[i]);
    return j;
}

inline nlohmann::json mat_to_json(const Mat& m) {
    nlohmann::json j = nlohmann::json::array();
    for (int i = 0; i < m.dim(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (int k = 0; k < m.dim(); ++k) row.push_back(m(i, k));
        j.push_back(row);
    }
    return j;
}

/// Parses an n x n numeric array-of-arrays; `where` names the config key in
/// error messages.
inline Mat mat_from_json(const nlohmann::json& j, int n, const std::string& where) {
    if (!j.is_array() || static_cast<int>(j.size()) != n)
        throw std::invalid_argument(where + ": expected " + std::to_string(n) + " rows");
    Mat m = Mat::zero(n);
    for (int i = 0; i < n; ++i) {
        const auto& row = j[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<int>(row.size()) != n)
            throw std::invalid_argument(where + ": row " + std::to_string(i) +
                                        " must hold " + std::to_string(n) + " numbers");
        for (int k = 0; k < n; ++k) {
            const auto& e = row[static_cast<std::size_t>(k)];
            if (!e.is_number()) throw std::invalid_argument(where + ": non-numeric entry");
            m(i, k) = e.get<double>();
        }
    }
    return m;
}

inline Vec vec_from_json(const nlohmann::json& j, int n, const std::string& where) {
    if (!j.is_array() || static_cast<int>(j.size()) != n)
        throw std::invalid_argument(where + ": expected " + std::to_string(n) + " numbers");
    Vec v(n);
    for (int i = 0; i < n; ++i) {
        const auto& e = j[static_cast<std::size_t>(i)];
        if (!e.is_number()) throw std::invalid_argument(where + ": non-numeric entry");
        v[i] = e.get<double>();
    }
    return v;
}

} // namespace varinv
