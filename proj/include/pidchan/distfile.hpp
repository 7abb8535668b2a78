#pragma once

// Text formats for joint distributions and raw channels.
//
// Distribution file (tab-separated, '#' starts a comment):
//   @vars       T  Y1  Y2
//   @alphabet   T  0  1        optional, fixes symbol order and size
//   0  0  0  0.25              one record per outcome tuple
//
// Channel file: one block per channel, one input symbol per line.
//   @channel  K1
//   0.25  0.75
//   0.35  0.65

#include "pidchan/probcore.hpp"

#include <cstddef>
#include <istream>
#include <stdexcept>
#include <string>
#include <vector>

namespace pidchan {

class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& message);
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Sum tolerance: tables off by at most this much are renormalized.
inline constexpr double kSumTolerance = 1e-6;

struct DistributionFile {
    std::vector<std::string> names;
    JointTable table;
};

DistributionFile read_distribution(std::istream& in);
DistributionFile parse_distribution(const std::string& text);
/// Writes every alphabet and every positive cell with 17 significant digits.
std::string write_distribution(const JointTable& table, const std::vector<std::string>& names = {});

struct NamedChannel {
    std::string name;
    Channel channel;
};

std::vector<NamedChannel> read_channels(std::istream& in);
std::vector<NamedChannel> parse_channels(const std::string& text);
std::string write_channels(const std::vector<NamedChannel>& channels);

/// True when the text contains a channel block rather than a distribution.
bool looks_like_channel_file(const std::string& text);

}  // namespace pidchan
