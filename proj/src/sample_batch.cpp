#include "cvqkd/sample_batch.hpp"

#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace cvqkd {

SampleBatch::SampleBatch(std::uint64_t seed, std::size_t n) : seed_(seed), n_(n) {
    if (n < 1) throw std::invalid_argument("SampleBatch: n must be >= 1");
}

void SampleBatch::add_column(std::string name, std::vector<double> values) {
    if (values.size() != n_)
        throw std::invalid_argument("SampleBatch: column '" + name + "' has wrong length");
    if (has_column(name))
        throw std::invalid_argument("SampleBatch: duplicate column '" + name + "'");
    names_.push_back(std::move(name));
    columns_.push_back(std::move(values));
}

bool SampleBatch::has_column(std::string_view name) const {
    for (const auto& existing : names_)
        if (existing == name) return true;
    return false;
}

std::size_t SampleBatch::find(std::string_view name) const {
    for (std::size_t i = 0; i < names_.size(); ++i)
        if (names_[i] == name) return i;
    throw std::out_of_range("SampleBatch: no column '" + std::string(name) + "'");
}

std::span<const double> SampleBatch::column(std::string_view name) const {
    return columns_[find(name)];
}

void SampleBatch::write_csv(std::ostream& os) const {
    for (std::size_t c = 0; c < names_.size(); ++c)
        os << (c ? "," : "") << names_[c];
    os << '\n';
    char buf[32];
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t c = 0; c < columns_.size(); ++c) {
            std::snprintf(buf, sizeof buf, "%.17g", columns_[c][i]);
            os << (c ? "," : "") << buf;
        }
        os << '\n';
    }
}

} // namespace cvqkd
