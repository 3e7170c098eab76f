#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "psvd/givens.hpp"
#include "psvd/matrix.hpp"
#include "psvd/op_counter.hpp"

namespace psvd {

enum class MeshOrientation { standard, flipped };

// One 2x2 unitary block of the mesh, acting on its two physical channels as
// [ c -s ; s c ] in channel port order (lower channel first).
struct MeshBlock {
    std::size_t diag = 0;  // 1-based diagonal index
    std::size_t pos = 0;   // 1-based position along the diagonal
    double c = 1.0;
    double s = 0.0;
    bool identity = true;
};

// Noiseless simulator of a Reck-triangle programmable interferometer mesh:
// n(n-1)/2 blocks, light traverses diagonal by diagonal, and within a
// diagonal the block on the last channel pair is passed first. Block
// (d, p) couples channels d+p-1, d+p (1-based).
//
// Orientation maps coordinates onto channels: standard is the identity map,
// flipped reverses the channel order without touching the hardware blocks,
// so the dense matrix realized by a flipped mesh is P_rev * (standard
// realization) * P_rev.
//
// Accounting: one chip_config per reset-plus-program cycle (counted at
// reset; individual block writes are free), one chip_op per vector passed.
class PhotonicMesh {
public:
    explicit PhotonicMesh(std::size_t size) : size_(size)
    {
        if (size < 1) throw std::invalid_argument("PhotonicMesh: size must be >= 1");
        blocks_.reserve(size * (size - 1) / 2);
        for (std::size_t d = 1; d + 1 <= size; ++d)
            for (std::size_t p = 1; p <= size - d; ++p) blocks_.push_back({d, p, 1.0, 0.0, true});
    }

    std::size_t size() const { return size_; }
    std::size_t block_count() const { return blocks_.size(); }
    MeshOrientation orientation() const { return orientation_; }
    const OpCounter& counters() const { return ops_; }

    // Reallocates which optical channel carries which coordinate. No
    // hardware change, no counter increment.
    void set_orientation(MeshOrientation o) { orientation_ = o; }

    // All blocks back to exact identity. One reconfiguration cycle.
    void reset()
    {
        for (MeshBlock& b : blocks_) {
            b.c = 1.0;
            b.s = 0.0;
            b.identity = true;
        }
        ops_.chip_config += 1;
    }

    // Coordinate plane pair wired at block (diag, pos) under the current
    // orientation, 0-based, ordered.
    std::pair<std::size_t, std::size_t> wired_planes(std::size_t diag, std::size_t pos) const
    {
        check_address(diag, pos);
        const std::size_t lo_channel = diag + pos - 1;  // 1-based
        if (orientation_ == MeshOrientation::standard) return {lo_channel - 1, lo_channel};
        return {size_ - lo_channel - 1, size_ - lo_channel};
    }

    // Programs the rotation onto the addressed block. The rotation's plane
    // pair must match the wired pair under the current orientation.
    void program_block(std::size_t diag, std::size_t pos, const GivensRotation& g)
    {
        check_address(diag, pos);
        auto [i, j] = wired_planes(diag, pos);
        if (g.i != i || g.j != j)
            throw std::invalid_argument("program_block: rotation planes do not match wired channel pair");
        MeshBlock& b = block_at(diag, pos);
        b.c = g.c;
        // Under the flipped orientation the block's ports see the coordinate
        // pair in reversed order, which conjugates the 2x2 by a swap; storing
        // -s keeps the realized coordinate action equal to G.
        b.s = orientation_ == MeshOrientation::standard ? g.s : -g.s;
        b.identity = false;
    }

    // Convenience for diagonal-1 programming: addresses the block whose wired
    // coordinate planes are (plane, plane+1) under the current orientation.
    void program_adjacent(std::size_t plane, const GivensRotation& g)
    {
        if (g.i != plane || g.j != plane + 1)
            throw std::invalid_argument("program_adjacent: rotation planes mismatch");
        const std::size_t pos =
            orientation_ == MeshOrientation::standard ? plane + 1 : size_ - plane - 1;
        program_block(1, pos, g);
    }

    // Negates the coordinate action of the addressed block (rotation by an
    // extra half turn); used to fold the annihilation sign convention into
    // the last rotation of a sequence.
    void negate_block(std::size_t diag, std::size_t pos)
    {
        MeshBlock& b = block_at(diag, pos);
        b.c = -b.c;
        b.s = -b.s;
        b.identity = false;
    }

    void negate_adjacent(std::size_t plane)
    {
        const std::size_t pos =
            orientation_ == MeshOrientation::standard ? plane + 1 : size_ - plane - 1;
        negate_block(1, pos);
    }

    // One vector pass: the dense mesh matrix applied to z. One chip_op.
    std::vector<double> pass_vector(std::span<const double> z)
    {
        if (z.size() != size_) throw std::invalid_argument("pass_vector: length mismatch");
        std::vector<double> v(z.begin(), z.end());
        stream(v);
        ops_.chip_op += 1;
        return v;
    }

    // mesh * M, one chip_op per column.
    DenseMatrix pass_matrix_columns(const DenseMatrix& m)
    {
        if (m.rows() != size_) throw std::invalid_argument("pass_matrix_columns: dimension mismatch");
        DenseMatrix out = m;
        std::vector<double> col(size_);
        for (std::size_t j = 0; j < m.cols(); ++j) {
            for (std::size_t i = 0; i < size_; ++i) col[i] = out(i, j);
            stream(col);
            for (std::size_t i = 0; i < size_; ++i) out(i, j) = col[i];
        }
        ops_.chip_op += m.cols();
        return out;
    }

    // Dense realization under the current orientation. Diagnostic only: no
    // counter cost.
    DenseMatrix dense_realization() const
    {
        DenseMatrix out = DenseMatrix::identity(size_);
        std::vector<double> col(size_);
        for (std::size_t j = 0; j < size_; ++j) {
            for (std::size_t i = 0; i < size_; ++i) col[i] = out(i, j);
            stream(col);
            for (std::size_t i = 0; i < size_; ++i) out(i, j) = col[i];
        }
        return out;
    }

private:
    void check_address(std::size_t diag, std::size_t pos) const
    {
        if (diag < 1 || diag >= size_ || pos < 1 || pos > size_ - diag)
            throw std::invalid_argument("mesh block address outside triangle");
    }

    MeshBlock& block_at(std::size_t diag, std::size_t pos)
    {
        // Blocks are stored diagonal-major, position-minor.
        std::size_t idx = 0;
        for (std::size_t d = 1; d < diag; ++d) idx += size_ - d;
        return blocks_[idx + pos - 1];
    }

    // Applies the mesh to a coordinate vector in physical light order.
    void stream(std::vector<double>& v) const
    {
        const bool flip = orientation_ == MeshOrientation::flipped;
        if (flip) std::reverse(v.begin(), v.end());
        std::size_t idx = 0;
        for (std::size_t d = 1; d + 1 <= size_; ++d) {
            const std::size_t count = size_ - d;
            // Within a diagonal the bottom channel pair interacts first.
            for (std::size_t p = count; p >= 1; --p) {
                const MeshBlock& b = blocks_[idx + p - 1];
                if (b.identity) continue;
                const std::size_t a = d + p - 2;  // 0-based lower channel
                const double x = v[a], y = v[a + 1];
                v[a] = b.c * x - b.s * y;
                v[a + 1] = b.s * x + b.c * y;
            }
            idx += count;
        }
        if (flip) std::reverse(v.begin(), v.end());
    }

    std::size_t size_;
    std::vector<MeshBlock> blocks_;
    MeshOrientation orientation_ = MeshOrientation::standard;
    OpCounter ops_;
};

}  // namespace psvd
