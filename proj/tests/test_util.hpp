#pragma once

#include "volvar/marketdata.hpp"

#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace volvar::testing {

inline Date date(int y, unsigned m, unsigned d) {
    return Date{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
}

inline TradingDay make_day(const Date& d, const std::vector<double>& prices, double volume = 100.0) {
    TradingDay day{d, {}};
    for (std::size_t i = 0; i < prices.size(); ++i) {
        day.bars.push_back({Timestamp{d, 570 + 5 * static_cast<int>(i)}, prices[i], volume + static_cast<double>(i)});
    }
    return day;
}

// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("volvar_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline std::vector<double> normal_sample(std::size_t n, std::uint64_t seed, double sd = 1.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(0.0, sd);
    std::vector<double> out(n);
    for (auto& x : out) x = dist(rng);
    return out;
}

}  // namespace volvar::testing
