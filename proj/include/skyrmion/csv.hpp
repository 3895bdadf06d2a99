#pragma once

// Locale-independent CSV output. Doubles use the shortest round-trip form.

#include <charconv>
#include <concepts>
#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>
#include <system_error>

namespace skyrmion {

inline std::string format_double(double v) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    if (r.ec != std::errc()) return "nan";
    return std::string(buf, r.ptr);
}

class CsvWriter {
public:
    explicit CsvWriter(std::ostream& os) : os_(os) {}

    void header(std::initializer_list<std::string_view> cols) {
        for (auto c : cols) field(c);
        end_row();
    }

    CsvWriter& field(std::string_view s) {
        sep();
        if (s.find_first_of(",\"\n") == std::string_view::npos) {
            os_ << s;
        } else {
            os_ << '"';
            for (char c : s) {
                if (c == '"') os_ << '"';
                os_ << c;
            }
            os_ << '"';
        }
        return *this;
    }
    CsvWriter& field(const char* s) { return field(std::string_view(s)); }
    CsvWriter& field(const std::string& s) { return field(std::string_view(s)); }
    CsvWriter& field(double v) { return field(std::string_view(format_double(v))); }
    CsvWriter& field(bool v) { return field(std::string_view(v ? "1" : "0")); }
    template <std::integral T>
    CsvWriter& field(T v) {
        return field(std::string_view(std::to_string(v)));
    }

    template <class... Ts>
    void row(const Ts&... vs) {
        (field(vs), ...);
        end_row();
    }

    void end_row() {
        os_ << '\n';
        first_ = true;
    }

private:
    void sep() {
        if (!first_) os_ << ',';
        first_ = false;
    }
    std::ostream& os_;
    bool first_ = true;
};

}  // namespace skyrmion
