#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cvqkd {

// Columnar record of quadrature realizations. All columns share the same
// length; the seed that produced the batch travels with it.
class SampleBatch {
public:
    SampleBatch(std::uint64_t seed, std::size_t n);

    std::size_t size() const { return n_; }
    std::uint64_t seed() const { return seed_; }

    void add_column(std::string name, std::vector<double> values);
    bool has_column(std::string_view name) const;
    std::span<const double> column(std::string_view name) const;
    const std::vector<std::string>& column_names() const { return names_; }

    // Header row plus one row per sample; '.' decimal point, ',' separator.
    void write_csv(std::ostream& os) const;

private:
    std::size_t find(std::string_view name) const;

    std::uint64_t seed_;
    std::size_t n_;
    std::vector<std::string> names_;
    std::vector<std::vector<double>> columns_;
};

} // namespace cvqkd
