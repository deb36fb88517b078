#include "csv.hpp"

#include "socbench/error.hpp"

namespace socbench::csv {

std::vector<Row> parse(std::string_view text) {
    if (text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);

    std::vector<Row> rows;
    Row row;
    std::string field;
    bool quoted = false;
    bool row_has_content = false;

    auto end_field = [&] {
        row.push_back(std::move(field));
        field.clear();
        row_has_content = true;
    };
    auto end_row = [&] {
        if (row_has_content || !field.empty()) {
            end_field();
            rows.push_back(std::move(row));
        }
        row.clear();
        row_has_content = false;
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char ch = text[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += ch;
            }
            continue;
        }
        switch (ch) {
            case '"':
                quoted = true;
                row_has_content = true;
                break;
            case ',': end_field(); break;
            case '\r':
                if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
                end_row();
                break;
            case '\n': end_row(); break;
            default: field += ch;
        }
    }
    if (quoted) fail(ErrorCode::schema_violation, "unterminated quoted CSV field");
    end_row();
    return rows;
}

std::string escape(std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char ch : field) {
        if (ch == '"') out += '"';
        out += ch;
    }
    out += '"';
    return out;
}

}  // namespace socbench::csv
