#pragma once

#include <cstdint>
#include <random>
#include <string>

#include "qmlab/algebra.hpp"
#include "qmlab/states.hpp"

namespace qmlab {

using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x);
// splitmix64(splitmix64(master) + index): independent child seeds.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);
// Per-trial seed of a named suite.
std::uint64_t trial_seed(std::uint64_t master, const std::string& suite, std::uint64_t trial);

double uniform(Rng& rng, double lo, double hi);
// Entries (g1 + i g2)/sqrt(2) with independent standard normals.
Matrix gaussian_matrix(Rng& rng, int rows, int cols);
Vector random_unit_vector(Rng& rng, int n);
// QR of a Gaussian matrix with the diagonal phases of R removed.
Matrix haar_unitary(Rng& rng, int n);

Element random_element(Rng& rng, const AlgebraShape& shape);
Element random_hermitian(Rng& rng, const AlgebraShape& shape);
Element random_unitary(Rng& rng, const AlgebraShape& shape);
// Unit vector supported on one block (chosen at random when block < 0).
Vector random_block_vector(Rng& rng, const AlgebraShape& shape, int block = -1);
State random_pure_state(Rng& rng, const AlgebraShape& shape);
// Normalized G G^dagger with G Gaussian per block, block weights random.
State random_state(Rng& rng, const AlgebraShape& shape);

}  // namespace qmlab
