#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace dotshape {

/// Dense 2D cell field, row-major with x fastest.
template <typename T>
class Field {
public:
    Field() = default;
    Field(int nx, int ny, T fill = T{})
        : nx_(nx), ny_(ny), v_(static_cast<std::size_t>(nx) * ny, fill) {
        if (nx <= 0 || ny <= 0)
            throw std::invalid_argument("Field: dimensions must be positive");
    }

    int nx() const { return nx_; }
    int ny() const { return ny_; }
    std::size_t size() const { return v_.size(); }

    T& operator()(int ix, int iy) { return v_[idx(ix, iy)]; }
    const T& operator()(int ix, int iy) const { return v_[idx(ix, iy)]; }

    T& operator[](std::size_t i) { return v_[i]; }
    const T& operator[](std::size_t i) const { return v_[i]; }

    std::size_t idx(int ix, int iy) const {
        return static_cast<std::size_t>(iy) * nx_ + ix;
    }
    bool inside(int ix, int iy) const {
        return ix >= 0 && ix < nx_ && iy >= 0 && iy < ny_;
    }

    T* data() { return v_.data(); }
    const T* data() const { return v_.data(); }
    std::vector<T>& vec() { return v_; }
    const std::vector<T>& vec() const { return v_; }

    void fill(T value) { v_.assign(v_.size(), value); }

    template <typename U>
    bool same_shape(const Field<U>& o) const {
        return nx_ == o.nx() && ny_ == o.ny();
    }

    friend bool operator==(const Field& a, const Field& b) {
        return a.nx_ == b.nx_ && a.ny_ == b.ny_ && a.v_ == b.v_;
    }

private:
    int nx_ = 0;
    int ny_ = 0;
    std::vector<T> v_;
};

using ScalarField = Field<double>;
using MaskField = Field<std::uint8_t>;

} // namespace dotshape
