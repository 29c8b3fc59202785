#pragma once

#include <charconv>
#include <istream>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "parroute/error.hpp"

namespace parroute::detail {

/// Shortest decimal form that reads back to the same double.
inline std::string format_double(double v)
{
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

/// Splits a whitespace-separated text file into tokens one line at a time,
/// skipping blank lines and '#' comments, tracking the line number.
class LineReader {
public:
    explicit LineReader(std::istream &in) : in_(in) {}

    bool next()
    {
        while (std::getline(in_, text_)) {
            ++line_;
            tokens_.clear();
            std::string_view rest(text_);
            while (!rest.empty()) {
                auto start = rest.find_first_not_of(" \t\r");
                if (start == std::string_view::npos)
                    break;
                rest.remove_prefix(start);
                auto stop = rest.find_first_of(" \t\r");
                tokens_.push_back(rest.substr(0, stop));
                rest.remove_prefix(stop == std::string_view::npos ? rest.size() : stop);
            }
            if (tokens_.empty() || tokens_[0].front() == '#')
                continue;
            return true;
        }
        return false;
    }

    int line() const { return line_; }
    std::size_t size() const { return tokens_.size(); }
    std::string_view token(std::size_t i) const { return tokens_.at(i); }

    long long int_at(std::size_t i) const
    {
        if (i >= tokens_.size())
            throw ParseError(line_, "missing field " + std::to_string(i));
        long long v = 0;
        auto tok = tokens_[i];
        auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (ec != std::errc() || ptr != tok.data() + tok.size())
            throw ParseError(line_, "expected integer, got '" + std::string(tok) + "'");
        return v;
    }

    int small_int_at(std::size_t i) const
    {
        const long long v = int_at(i);
        if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
            throw ParseError(line_, "integer out of range: " + std::to_string(v));
        return static_cast<int>(v);
    }

    double double_at(std::size_t i) const
    {
        if (i >= tokens_.size())
            throw ParseError(line_, "missing field " + std::to_string(i));
        double v = 0;
        auto tok = tokens_[i];
        auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (ec != std::errc() || ptr != tok.data() + tok.size())
            throw ParseError(line_, "expected number, got '" + std::string(tok) + "'");
        return v;
    }

private:
    std::istream &in_;
    std::string text_;
    std::vector<std::string_view> tokens_;
    int line_ = 0;
};

} // namespace parroute::detail
