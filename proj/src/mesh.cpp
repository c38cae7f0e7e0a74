#include "mmfem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <numbers>
#include <sstream>
#include <unordered_map>

#include "mmfem/errors.hpp"

namespace mmfem {

namespace {

using Key = std::int64_t;

Key edge_key(int a, int b, Key n) { return Key(a) * n + b; }
Key face_key(int a, int b, int c, Key n) { return (Key(a) * n + b) * n + c; }

AffineMap make_map(int dim, const std::vector<Point>& v, const std::array<int, 4>& c) {
    AffineMap m;
    m.origin = v[c[0]];
    auto col = [&](int local) {
        const Point& x = v[c[local]];
        return Eigen::Vector3d(x[0] - m.origin[0], x[1] - m.origin[1], x[2] - m.origin[2]);
    };
    m.J.setIdentity();
    if (dim == 2) {
        m.J.col(0) = col(2);
        m.J.col(1) = col(1);
        m.J(2, 0) = m.J(2, 1) = 0.0;
        m.J(2, 2) = 1.0;
    } else {
        m.J.col(0) = col(3);
        m.J.col(1) = col(2);
        m.J.col(2) = col(1);
    }
    m.det = m.J.determinant();
    return m;
}

double cell_scale(int dim, const std::vector<Point>& v, const std::array<int, 4>& c) {
    double h = 0;
    for (int a = 0; a <= dim; ++a)
        for (int b = a + 1; b <= dim; ++b) {
            double s = 0;
            for (int d = 0; d < 3; ++d) s += (v[c[a]][d] - v[c[b]][d]) * (v[c[a]][d] - v[c[b]][d]);
            h = std::max(h, std::sqrt(s));
        }
    return std::pow(h, dim);
}

}  // namespace

std::vector<int> Mesh::facet_vertices(int facet) const {
    if (dim == 2) return {edges.at(facet)[0], edges.at(facet)[1]};
    const auto& f = faces.at(facet);
    return {f[0], f[1], f[2]};
}

int Mesh::find_facet(std::vector<int> verts) const {
    std::sort(verts.begin(), verts.end());
    if (static_cast<int>(verts.size()) != dim) throw BadIndex("facet needs " + std::to_string(dim) + " vertices");
    if (verts.front() < 0 || verts.back() >= num_vertices()) throw BadIndex("facet vertex out of range");
    // Facets touching the smallest vertex are found through its incident cells.
    for (int c = 0; c < num_cells(); ++c) {
        const auto& cv = cells[c];
        if (!std::binary_search(cv.begin(), cv.begin() + dim + 1, verts[0])) continue;
        if (dim == 2) {
            for (int e = 0; e < 3; ++e)
                if (edges[cell_edges[c][e]] == std::array<int, 2>{verts[0], verts[1]}) return cell_edges[c][e];
        } else {
            for (int f = 0; f < 4; ++f)
                if (faces[cell_faces[c][f]] == std::array<int, 3>{verts[0], verts[1], verts[2]})
                    return cell_faces[c][f];
        }
    }
    throw BadIndex("facet not present in the mesh");
}

Mesh build(int dim, std::vector<Point> vertices, std::vector<std::vector<int>> cells, const FacetTags& tags) {
    if (dim != 2 && dim != 3) throw InvalidParam("mesh dimension must be 2 or 3");
    Mesh m;
    m.dim = dim;
    m.vertices = std::move(vertices);
    const int nv = m.num_vertices();
    const Key n = nv;
    m.cells.reserve(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
        auto& ids = cells[c];
        if (static_cast<int>(ids.size()) != dim + 1)
            throw BadIndex("cell " + std::to_string(c) + " has " + std::to_string(ids.size()) + " vertices");
        std::sort(ids.begin(), ids.end());
        if (ids.front() < 0 || ids.back() >= nv) throw BadIndex("cell " + std::to_string(c) + " references a missing vertex");
        if (std::adjacent_find(ids.begin(), ids.end()) != ids.end())
            throw DegenerateCell("cell " + std::to_string(c) + " repeats a vertex");
        std::array<int, 4> cv{-1, -1, -1, -1};
        std::copy(ids.begin(), ids.end(), cv.begin());
        m.cells.push_back(cv);
        const AffineMap map = make_map(dim, m.vertices, cv);
        if (std::abs(map.det) < 1e-14 * cell_scale(dim, m.vertices, cv))
            throw DegenerateCell("cell " + std::to_string(c) + " has vanishing volume");
        AffineMap full = map;
        full.inv_JT = map.J.inverse().transpose();
        m.maps.push_back(full);
    }

    std::unordered_map<Key, int> edge_ids, face_ids;
    m.cell_edges.assign(m.cells.size(), {-1, -1, -1, -1, -1, -1});
    m.cell_faces.assign(m.cells.size(), {-1, -1, -1, -1});
    for (int c = 0; c < m.num_cells(); ++c) {
        const auto& cv = m.cells[c];
        const auto local_edges = edge_vertices(dim);
        for (std::size_t e = 0; e < local_edges.size(); ++e) {
            const int a = cv[local_edges[e][0]], b = cv[local_edges[e][1]];
            auto [it, fresh] = edge_ids.try_emplace(edge_key(a, b, n), m.num_edges());
            if (fresh) {
                m.edges.push_back({a, b});
                m.edge_cells.emplace_back();
            }
            m.cell_edges[c][e] = it->second;
            m.edge_cells[it->second].push_back(c);
        }
        if (dim == 3)
            for (int f = 0; f < 4; ++f) {
                const auto lf = face_vertices()[f];
                const int a = cv[lf[0]], b = cv[lf[1]], d = cv[lf[2]];
                auto [it, fresh] = face_ids.try_emplace(face_key(a, b, d, n), m.num_faces());
                if (fresh) {
                    m.faces.push_back({a, b, d});
                    m.face_cells.emplace_back();
                }
                m.cell_faces[c][f] = it->second;
                m.face_cells[it->second].push_back(c);
            }
    }

    m.boundary_vertex.assign(nv, 0);
    m.boundary_edge.assign(m.edges.size(), 0);
    m.boundary_face.assign(m.faces.size(), 0);
    const auto& facet_cells = dim == 2 ? m.edge_cells : m.face_cells;
    for (int f = 0; f < static_cast<int>(facet_cells.size()); ++f) {
        if (facet_cells[f].size() > 2) throw BadIndex("non-manifold facet " + std::to_string(f));
        if (facet_cells[f].size() != 1) continue;
        m.boundary_facets.push_back(f);
        if (dim == 2) {
            m.boundary_edge[f] = 1;
            for (int v : m.edges[f]) m.boundary_vertex[v] = 1;
        } else {
            m.boundary_face[f] = 1;
            const auto& fv = m.faces[f];
            for (int v : fv) m.boundary_vertex[v] = 1;
            m.boundary_edge[edge_ids.at(edge_key(fv[0], fv[1], n))] = 1;
            m.boundary_edge[edge_ids.at(edge_key(fv[0], fv[2], n))] = 1;
            m.boundary_edge[edge_ids.at(edge_key(fv[1], fv[2], n))] = 1;
        }
    }

    for (const auto& [label, facets] : tags) {
        auto& ids = m.boundary_tags[label];
        for (auto verts : facets) {
            std::sort(verts.begin(), verts.end());
            if (static_cast<int>(verts.size()) != dim) throw BadIndex("tag '" + label + "' has a malformed facet");
            const Key key = dim == 2 ? edge_key(verts[0], verts[1], n) : face_key(verts[0], verts[1], verts[2], n);
            const auto& lookup = dim == 2 ? edge_ids : face_ids;
            auto it = lookup.find(key);
            if (it == lookup.end()) throw BadIndex("tag '" + label + "' names a facet missing from the mesh");
            ids.push_back(it->second);
        }
    }
    return m;
}

Mesh generate_box(int dim, const Point& lo, const Point& hi, const std::array<int, 3>& n) {
    if (dim != 2 && dim != 3) throw InvalidParam("box dimension must be 2 or 3");
    for (int d = 0; d < dim; ++d) {
        if (n[d] < 1) throw InvalidParam("box needs at least one division per axis");
        if (!(hi[d] > lo[d])) throw InvalidParam("box bounds must be increasing");
    }
    const int nx = n[0], ny = n[1], nz = dim == 3 ? n[2] : 0;
    std::vector<Point> verts;
    auto vid = [&](int i, int j, int k) { return (k * (ny + 1) + j) * (nx + 1) + i; };
    for (int k = 0; k <= nz; ++k)
        for (int j = 0; j <= ny; ++j)
            for (int i = 0; i <= nx; ++i)
                verts.push_back({lo[0] + (hi[0] - lo[0]) * i / nx, lo[1] + (hi[1] - lo[1]) * j / ny,
                                 dim == 3 ? lo[2] + (hi[2] - lo[2]) * k / nz : 0.0});
    std::vector<std::vector<int>> cells;
    if (dim == 2) {
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                cells.push_back({vid(i, j, 0), vid(i + 1, j, 0), vid(i + 1, j + 1, 0)});
                cells.push_back({vid(i, j, 0), vid(i + 1, j + 1, 0), vid(i, j + 1, 0)});
            }
    } else {
        // Kuhn split: one tetrahedron per axis permutation, all sharing the main diagonal.
        std::array<int, 3> perm{0, 1, 2};
        std::vector<std::array<int, 3>> perms;
        do perms.push_back(perm);
        while (std::next_permutation(perm.begin(), perm.end()));
        for (int k = 0; k < nz; ++k)
            for (int j = 0; j < ny; ++j)
                for (int i = 0; i < nx; ++i)
                    for (const auto& pm : perms) {
                        std::array<int, 3> c{i, j, k};
                        std::vector<int> tet{vid(c[0], c[1], c[2])};
                        for (int axis : pm) {
                            ++c[axis];
                            tet.push_back(vid(c[0], c[1], c[2]));
                        }
                        cells.push_back(tet);
                    }
    }
    Mesh mesh = build(dim, std::move(verts), std::move(cells));
    static const char* names[3][2] = {{"xmin", "xmax"}, {"ymin", "ymax"}, {"zmin", "zmax"}};
    for (int f : mesh.boundary_facets) {
        const auto fv = mesh.facet_vertices(f);
        for (int d = 0; d < dim; ++d)
            for (int side = 0; side < 2; ++side) {
                const double target = side == 0 ? lo[d] : hi[d];
                const bool on = std::all_of(fv.begin(), fv.end(),
                                            [&](int v) { return mesh.vertices[v][d] == target; });
                if (on) mesh.boundary_tags[names[d][side]].push_back(f);
            }
    }
    return mesh;
}

Mesh generate_disk(double radius, int rings) {
    if (!(radius > 0) || rings < 1) throw InvalidParam("disk needs a positive radius and at least one ring");
    std::vector<Point> verts{{0, 0, 0}};
    std::vector<int> ring_start{0};
    for (int k = 1; k <= rings; ++k) {
        ring_start.push_back(static_cast<int>(verts.size()));
        const double r = radius * k / rings;
        for (int m = 0; m < 6 * k; ++m) {
            const double th = 2 * std::numbers::pi * m / (6 * k);
            verts.push_back({r * std::cos(th), r * std::sin(th), 0});
        }
    }
    std::vector<std::vector<int>> cells;
    for (int k = 1; k <= rings; ++k) {
        const int no = 6 * k, ni = 6 * (k - 1);
        auto outer = [&](int j) { return ring_start[k] + j % no; };
        if (k == 1) {
            for (int j = 0; j < no; ++j) cells.push_back({0, outer(j), outer(j + 1)});
            continue;
        }
        auto inner = [&](int i) { return ring_start[k - 1] + i % ni; };
        // Merge both rings by angle; angles compared exactly as fractions of the full turn.
        int i = 0, j = 0;
        while (i < ni || j < no) {
            const bool take_outer = i == ni || (j < no && Key(j + 1) * ni <= Key(i + 1) * no);
            if (take_outer) {
                cells.push_back({inner(i), outer(j), outer(j + 1)});
                ++j;
            } else {
                cells.push_back({inner(i), inner(i + 1), outer(j)});
                ++i;
            }
        }
    }
    Mesh mesh = build(2, std::move(verts), std::move(cells));
    mesh.boundary_tags["boundary"] = mesh.boundary_facets;
    return mesh;
}

Mesh generate_disk_h(double radius, double target_h) {
    if (!(target_h > 0)) throw InvalidParam("target mesh size must be positive");
    return generate_disk(radius, std::max(1, static_cast<int>(std::ceil(radius / target_h))));
}

Point push_forward(const Mesh& mesh, int cell, const RefPoint& x) {
    const auto& m = mesh.maps.at(cell);
    const Eigen::Vector3d y = m.J * Eigen::Vector3d(x.xi, x.eta, mesh.dim == 3 ? x.zeta : 0.0);
    return {m.origin[0] + y[0], m.origin[1] + y[1], mesh.dim == 3 ? m.origin[2] + y[2] : 0.0};
}

RefPoint pull_back(const Mesh& mesh, int cell, const Point& x) {
    const auto& m = mesh.maps.at(cell);
    const Eigen::Vector3d d(x[0] - m.origin[0], x[1] - m.origin[1], mesh.dim == 3 ? x[2] - m.origin[2] : 0.0);
    const Eigen::Vector3d r = m.inv_JT.transpose() * d;
    return {r[0], r[1], mesh.dim == 3 ? r[2] : 0.0};
}

double cell_volume(const Mesh& mesh, int cell) {
    return std::abs(mesh.maps.at(cell).det) / (mesh.dim == 2 ? 2.0 : 6.0);
}

double total_volume(const Mesh& mesh) {
    double v = 0;
    for (int c = 0; c < mesh.num_cells(); ++c) v += cell_volume(mesh, c);
    return v;
}

int locate(const Mesh& mesh, const Point& x, double tol) {
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const auto lam = barycentric(mesh.dim, pull_back(mesh, c, x));
        if (std::all_of(lam.begin(), lam.begin() + mesh.dim + 1, [tol](double l) { return l >= -tol; })) return c;
    }
    return -1;
}

std::string to_json_string(const Mesh& mesh) {
    nlohmann::json j;
    j["dim"] = mesh.dim;
    auto& v = j["vertices"] = nlohmann::json::array();
    for (const auto& p : mesh.vertices)
        v.push_back(mesh.dim == 2 ? nlohmann::json{p[0], p[1]} : nlohmann::json{p[0], p[1], p[2]});
    auto& c = j["cells"] = nlohmann::json::array();
    for (const auto& cv : mesh.cells) c.push_back(std::vector<int>(cv.begin(), cv.begin() + mesh.dim + 1));
    auto& t = j["boundary_tags"] = nlohmann::json::object();
    for (const auto& [label, facets] : mesh.boundary_tags) {
        auto& list = t[label] = nlohmann::json::array();
        for (int f : facets) list.push_back(mesh.facet_vertices(f));
    }
    return j.dump(1);
}

void write_json(const Mesh& mesh, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open '" + path + "' for writing");
    out << to_json_string(mesh) << '\n';
}

Mesh from_json_string(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("malformed JSON: ") + e.what());
    }
    auto require = [&](const char* key) -> const nlohmann::json& {
        if (!j.is_object() || !j.contains(key)) throw ParseError(std::string("missing key '") + key + "'");
        return j.at(key);
    };
    try {
        const int dim = require("dim").get<int>();
        if (dim != 2 && dim != 3) throw ParseError("field 'dim' must be 2 or 3");
        std::vector<Point> verts;
        const auto& jv = require("vertices");
        for (std::size_t i = 0; i < jv.size(); ++i) {
            const auto& row = jv.at(i);
            if (!row.is_array() || static_cast<int>(row.size()) != dim)
                throw ParseError("vertices[" + std::to_string(i) + "] must hold " + std::to_string(dim) + " numbers");
            Point p{};
            for (int d = 0; d < dim; ++d) p[d] = row.at(d).get<double>();
            verts.push_back(p);
        }
        std::vector<std::vector<int>> cells;
        const auto& jc = require("cells");
        for (std::size_t i = 0; i < jc.size(); ++i) {
            if (!jc.at(i).is_array()) throw ParseError("cells[" + std::to_string(i) + "] must be an array");
            cells.push_back(jc.at(i).get<std::vector<int>>());
        }
        FacetTags tags;
        if (j.contains("boundary_tags"))
            for (const auto& [label, list] : j.at("boundary_tags").items())
                tags[label] = list.get<std::vector<std::vector<int>>>();
        return build(dim, std::move(verts), std::move(cells), tags);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad field type: ") + e.what());
    }
}

Mesh read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json_string(ss.str());
}

}  // namespace mmfem
