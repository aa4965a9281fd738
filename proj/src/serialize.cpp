#include "pistab/serialize.hpp"

#include "pistab/poly_parser.hpp"

namespace pistab {

using nlohmann::json;

json matrix_to_json(const PolyMatQ& m) {
    json rows = json::array();
    for (int i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (int j = 0; j < m.cols(); ++j) row.push_back(to_string(m.at(i, j)));
        rows.push_back(std::move(row));
    }
    json out;
    out["rows"] = m.rows();
    out["cols"] = m.cols();
    out["entries"] = std::move(rows);
    return out;
}

PolyMatQ matrix_from_json(const json& j, int rows, int cols) {
    if (!j.is_object() || !j.contains("entries")) throw ParseError("matrix JSON must carry 'entries'");
    if (j.value("rows", rows) != rows || j.value("cols", cols) != cols)
        throw DimensionError("matrix JSON shape disagrees with declared dims");
    PolyMatQ m(rows, cols);
    const json& entries = j["entries"];
    if (static_cast<int>(entries.size()) != rows) throw DimensionError("matrix JSON row count mismatch");
    PolyGrammar grammar;  // s and eta
    for (int i = 0; i < rows; ++i) {
        const json& row = entries[i];
        if (static_cast<int>(row.size()) != cols) throw DimensionError("matrix JSON column count mismatch");
        for (int jcol = 0; jcol < cols; ++jcol) {
            const json& cell = row[jcol];
            if (cell.is_number()) {
                m.at(i, jcol) = PolyQ(rational_from_double(cell.get<double>()));
            } else if (cell.is_string()) {
                m.at(i, jcol) = parse_poly(cell.get<std::string>(), grammar);
            } else {
                throw ParseError("matrix entries must be numbers or grammar strings");
            }
        }
    }
    return m;
}

json pi_to_json(const PiOpQ& op) {
    json j;
    j["interval"] = {to_string(op.iv.a), to_string(op.iv.b)};
    j["dims"] = {{"m_out", op.m_out}, {"n_out", op.n_out}, {"m_in", op.m_in}, {"n_in", op.n_in}};
    j["P"] = matrix_to_json(op.P);
    j["Q1"] = matrix_to_json(op.Q1);
    j["Q2"] = matrix_to_json(op.Q2);
    j["S"] = matrix_to_json(op.S);
    j["R1"] = matrix_to_json(op.R1);
    j["R2"] = matrix_to_json(op.R2);
    return j;
}

PiOpQ pi_from_json(const json& j) {
    PiOpQ op;
    const auto& iv = j.at("interval");
    op.iv.a = iv.at(0).is_string() ? rational_from_string(iv.at(0).get<std::string>())
                                   : rational_from_double(iv.at(0).get<double>());
    op.iv.b = iv.at(1).is_string() ? rational_from_string(iv.at(1).get<std::string>())
                                   : rational_from_double(iv.at(1).get<double>());
    const auto& dims = j.at("dims");
    op.m_out = dims.at("m_out").get<int>();
    op.n_out = dims.at("n_out").get<int>();
    op.m_in = dims.at("m_in").get<int>();
    op.n_in = dims.at("n_in").get<int>();
    op.P = matrix_from_json(j.at("P"), op.m_out, op.m_in);
    op.Q1 = matrix_from_json(j.at("Q1"), op.m_out, op.n_in);
    op.Q2 = matrix_from_json(j.at("Q2"), op.n_out, op.m_in);
    op.S = matrix_from_json(j.at("S"), op.n_out, op.n_in);
    op.R1 = matrix_from_json(j.at("R1"), op.n_out, op.n_in);
    op.R2 = matrix_from_json(j.at("R2"), op.n_out, op.n_in);
    op.validate();
    return op;
}

}  // namespace pistab
