// Copyright 2026 The qkml developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <bit>
#include <cstring>
#include <fstream>

#include "qkml/errors.hpp"
#include "qkml/qkernel.hpp"

namespace qkml {

namespace {

constexpr char kMagic[4] = {'Q', 'K', 'G', 'M'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::ostream &out, std::uint32_t v) {
    char bytes[4];
    for (int i = 0; i < 4; ++i) {
        bytes[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
    }
    out.write(bytes, 4);
}

void put_u64(std::ostream &out, std::uint64_t v) {
    char bytes[8];
    for (int i = 0; i < 8; ++i) {
        bytes[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
    }
    out.write(bytes, 8);
}

void put_f64(std::ostream &out, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    put_u64(out, bits);
}

std::uint32_t get_u32(std::istream &in) {
    unsigned char bytes[4];
    in.read(reinterpret_cast<char *>(bytes), 4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
        v |= static_cast<std::uint32_t>(bytes[i]) << (8 * i);
    }
    return v;
}

std::uint64_t get_u64(std::istream &in) {
    unsigned char bytes[8];
    in.read(reinterpret_cast<char *>(bytes), 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
        v |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
    }
    return v;
}

double get_f64(std::istream &in) {
    const std::uint64_t bits = get_u64(in);
    double v;
    std::memcpy(&v, &bits, sizeof v);
    return v;
}

} // namespace

void save_gram(const GramMatrix &K, const std::string &path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw FormatError("save_gram: cannot open '" + path + "' for writing");
    }
    out.write(kMagic, 4);
    put_u32(out, kVersion);
    put_u64(out, static_cast<std::uint64_t>(K.entries.rows()));
    put_u64(out, static_cast<std::uint64_t>(K.entries.cols()));
    out.put(K.sampled ? char{1} : char{0});
    put_u64(out, static_cast<std::uint64_t>(K.shots));
    put_u64(out, K.seed);
    for (Eigen::Index i = 0; i < K.entries.rows(); ++i) {
        for (Eigen::Index j = 0; j < K.entries.cols(); ++j) {
            put_f64(out, K.entries(i, j));
        }
    }
    if (!out) {
        throw FormatError("save_gram: write to '" + path + "' failed");
    }
}

GramMatrix load_gram(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw FormatError("load_gram: cannot open '" + path + "'");
    }
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0) {
        throw FormatError("load_gram: '" + path + "' is not a QKGM file");
    }
    const std::uint32_t version = get_u32(in);
    if (version != kVersion) {
        throw FormatError("load_gram: unsupported QKGM version " + std::to_string(version));
    }
    const std::uint64_t rows = get_u64(in);
    const std::uint64_t cols = get_u64(in);
    const int mode_tag = in.get();
    if (mode_tag != 0 && mode_tag != 1) {
        throw FormatError("load_gram: bad mode tag");
    }
    GramMatrix K;
    K.sampled = mode_tag == 1;
    K.shots = static_cast<std::int64_t>(get_u64(in));
    K.seed = get_u64(in);
    K.entries.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (Eigen::Index i = 0; i < K.entries.rows(); ++i) {
        for (Eigen::Index j = 0; j < K.entries.cols(); ++j) {
            K.entries(i, j) = get_f64(in);
        }
    }
    if (!in) {
        throw FormatError("load_gram: '" + path + "' is truncated");
    }
    K.symmetric = rows == cols && K.entries == K.entries.transpose().eval();
    return K;
}

} // namespace qkml
