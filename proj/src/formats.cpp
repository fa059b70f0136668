#include "vmfgs/formats.hpp"

#include <array>
#include <complex>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace vmfgs {

namespace {

using nlohmann::json;

std::string readFile(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

Eigen::MatrixXd parseRealMatrix(const json& rows, int dim, const std::string& field) {
    if (!rows.is_array() || static_cast<int>(rows.size()) != dim)
        throw ParseError("field '" + field + "' must be a " + std::to_string(dim) + "-row matrix");
    Eigen::MatrixXd m(dim, dim);
    for (int i = 0; i < dim; ++i) {
        const auto& row = rows[i];
        if (!row.is_array() || static_cast<int>(row.size()) != dim)
            throw ParseError("field '" + field + "' row " + std::to_string(i) + " has wrong length");
        for (int j = 0; j < dim; ++j) {
            if (!row[j].is_number())
                throw ParseError("field '" + field + "' contains a non-numeric entry");
            m(i, j) = row[j].get<double>();
        }
    }
    return m;
}

// Single-qubit Pauli matrices in the computational basis.
Eigen::Matrix2cd pauliMatrix(char op) {
    const std::complex<double> I(0.0, 1.0);
    Eigen::Matrix2cd m;
    switch (op) {
        case 'I': m << 1, 0, 0, 1; break;
        case 'X': m << 0, 1, 1, 0; break;
        case 'Y': m << 0, -I, I, 0; break;
        case 'Z': m << 1, 0, 0, -1; break;
        default: throw ParseError(std::string("unknown Pauli operator '") + op + "'");
    }
    return m;
}

}  // namespace

ComplexHermitian loadHamiltonianJson(const std::string& path) {
    json doc;
    try {
        doc = json::parse(readFile(path));
    } catch (const json::parse_error& e) {
        throw ParseError(path + ": " + e.what());
    }
    if (!doc.contains("dim") || !doc["dim"].is_number_integer())
        throw ParseError(path + ": missing integer field 'dim'");
    const int dim = doc["dim"].get<int>();
    if (dim < 1) throw ParseError(path + ": 'dim' must be >= 1");
    if (!doc.contains("re")) throw ParseError(path + ": missing field 're'");

    const Eigen::MatrixXd re = parseRealMatrix(doc["re"], dim, "re");
    Eigen::MatrixXd im = Eigen::MatrixXd::Zero(dim, dim);
    if (doc.contains("im")) im = parseRealMatrix(doc["im"], dim, "im");

    Eigen::MatrixXcd entries(dim, dim);
    entries.real() = re;
    entries.imag() = im;
    return ComplexHermitian(entries);  // NonHermitianError on bad input
}

void saveHamiltonianJson(const ComplexHermitian& H, const std::string& path) {
    const int dim = H.dim();
    json re = json::array(), im = json::array();
    for (int i = 0; i < dim; ++i) {
        json reRow = json::array(), imRow = json::array();
        for (int j = 0; j < dim; ++j) {
            reRow.push_back(H.entries()(i, j).real());
            imRow.push_back(H.entries()(i, j).imag());
        }
        re.push_back(std::move(reRow));
        im.push_back(std::move(imRow));
    }
    json doc{{"dim", dim}, {"re", std::move(re)}, {"im", std::move(im)}};
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write file: " + path);
    out << doc.dump(1) << "\n";
}

Eigen::MatrixXcd pauliTermMatrix(const std::string& opString) {
    if (opString.empty()) throw ParseError("empty Pauli string");
    Eigen::MatrixXcd acc = pauliMatrix(opString[0]);
    for (std::size_t q = 1; q < opString.size(); ++q) {
        const Eigen::Matrix2cd next = pauliMatrix(opString[q]);
        Eigen::MatrixXcd grown(acc.rows() * 2, acc.cols() * 2);
        for (Eigen::Index i = 0; i < acc.rows(); ++i)
            for (Eigen::Index j = 0; j < acc.cols(); ++j)
                grown.block<2, 2>(2 * i, 2 * j) = acc(i, j) * next;
        acc = std::move(grown);
    }
    return acc;
}

ComplexHermitian loadPauliFile(const std::string& path) {
    std::istringstream in(readFile(path));
    std::string line;
    Eigen::MatrixXcd sum;
    std::size_t qubits = 0;
    int lineNo = 0;
    bool any = false;
    while (std::getline(in, line)) {
        ++lineNo;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream fields(line);
        double coeff = 0.0;
        std::string ops;
        if (!(fields >> coeff >> ops))
            throw ParseError(path + ":" + std::to_string(lineNo) +
                             ": expected '<coefficient> <IXYZ string>'");
        std::string trailing;
        if (fields >> trailing)
            throw ParseError(path + ":" + std::to_string(lineNo) + ": unexpected trailing field");
        if (!any) {
            qubits = ops.size();
            if (qubits == 0 || qubits > 10)
                throw ParseError(path + ":" + std::to_string(lineNo) +
                                 ": Pauli string length must be in [1, 10]");
            const auto dim = static_cast<Eigen::Index>(1) << qubits;
            sum = Eigen::MatrixXcd::Zero(dim, dim);
            any = true;
        } else if (ops.size() != qubits) {
            throw ParseError(path + ":" + std::to_string(lineNo) +
                             ": inconsistent Pauli string length");
        }
        sum += coeff * pauliTermMatrix(ops);
    }
    if (!any) throw ParseError(path + ": no Pauli terms found");
    return ComplexHermitian(sum);
}

ComplexHermitian loadHamiltonian(const std::string& path) {
    const std::string text = readFile(path);
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') return loadHamiltonianJson(path);
    return loadPauliFile(path);
}

Eigen::VectorXcd loadComplexVectorJson(const std::string& path) {
    json doc;
    try {
        doc = json::parse(readFile(path));
    } catch (const json::parse_error& e) {
        throw ParseError(path + ": " + e.what());
    }
    if (!doc.contains("re") || !doc["re"].is_array())
        throw ParseError(path + ": missing array field 're'");
    const auto n = static_cast<Eigen::Index>(doc["re"].size());
    Eigen::VectorXcd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = doc["re"][i].get<double>();
    if (doc.contains("im")) {
        if (!doc["im"].is_array() || static_cast<Eigen::Index>(doc["im"].size()) != n)
            throw ParseError(path + ": 'im' length does not match 're'");
        for (Eigen::Index i = 0; i < n; ++i)
            v[i] += std::complex<double>(0.0, doc["im"][i].get<double>());
    }
    return v;
}

Eigen::VectorXd loadRealVector(const std::string& path) {
    std::istringstream in(readFile(path));
    std::vector<double> values;
    double x = 0.0;
    while (in >> x) values.push_back(x);
    if (!in.eof()) throw ParseError(path + ": non-numeric token in vector file");
    if (values.empty()) throw ParseError(path + ": empty vector file");
    return Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

}  // namespace vmfgs
