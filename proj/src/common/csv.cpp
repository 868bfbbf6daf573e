#include "dialogos/common/csv.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

#include "dialogos/common/errors.hpp"

namespace dialogos::csv {

std::vector<Row> parse(std::string_view content) {
    std::vector<Row> rows;
    Row row;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;
    std::size_t quote_start = 0;

    const auto end_field = [&] {
        row.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    const auto end_row = [&] {
        end_field();
        rows.push_back(std::move(row));
        row.clear();
    };

    for (std::size_t i = 0; i < content.size(); ++i) {
        const char c = content[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < content.size() && content[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(c);
            }
            continue;
        }
        switch (c) {
            case '"':
                in_quotes = true;
                field_started = true;
                quote_start = i;
                break;
            case ',':
                end_field();
                field_started = true;
                break;
            case '\r':
                break;
            case '\n':
                end_row();
                break;
            default:
                field.push_back(c);
                field_started = true;
        }
    }
    if (in_quotes) throw ParseError(quote_start, "unterminated quoted field");
    if (field_started || !field.empty() || !row.empty()) end_row();
    return rows;
}

std::vector<Row> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw LoadError(path, "cannot open file");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse(buffer.str());
}

namespace {

bool needs_quotes(const std::string& field) {
    return field.find_first_of(",\"\r\n") != std::string::npos || field.empty();
}

}  // namespace

std::string format_row(const Row& row, Quoting quoting) {
    std::string out;
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (i > 0) out.push_back(',');
        const auto& field = row[i];
        if (quoting == Quoting::all || needs_quotes(field)) {
            out.push_back('"');
            for (char c : field) {
                if (c == '"') out.push_back('"');
                out.push_back(c);
            }
            out.push_back('"');
        } else {
            out += field;
        }
    }
    return out;
}

void write_row(std::ostream& out, const Row& row, Quoting quoting) {
    out << format_row(row, quoting) << '\n';
}

}  // namespace dialogos::csv
