#pragma once

// Built-in host graphs and rule systems: the triangle subdivision rule and its
// hosts, the Koch snowflake, Moore grids for the game of life, a marked
// triangle mesh, and a few small systems used to exercise the analyses.

#include <optional>
#include <string>
#include <vector>

#include "portrewrite/rules.hpp"

namespace portrewrite::examples {

// Five nodes and three ports: p1 and p3 each sit on two nodes and both link to p2.
Pregraph shared_ports();

// Triangle E, B, C with ports e1, e2, b1, b2, c1, c2. With distinguishing
// attributes the ports of E, B and C carry 1, 2 and 3.
GraphWitness triangle_s(bool distinguishing = false);

// Two triangles E, B, C and B, D, C sharing the link b2-c1.
GraphWitness steps_host();

// Triangles E, B, C and C, D, F sharing node C, with distinguishing port tags.
GraphWitness match1_host();

// Node A, B, C, D with ports a1, b1, c1, d1 and one link c1-d1.
GraphWitness toy_host();

// Nodes 1, 2, 3 at (-1,0), (0,sqrt 2), (1,0); ports p tagged "-", q tagged "+".
GraphWitness koch_init();

struct GridOptions {
  int rows = 1;
  int cols = 1;
  std::vector<AttrValue> fill{AttrValue::number(0)};
  bool torus = false;  // wrap links around the borders
};

// Cells m_i_j with eight tagged ports e, w, n, s, ne, nw, se, sw. Row i grows
// southwards, column j eastwards.
GraphWitness moore_grid(const GridOptions& options);
std::string cell_id(int i, int j);
// Replaces the value set of one cell.
GraphWitness set_cell(const GraphWitness& g, int i, int j, std::vector<AttrValue> values);

// The block with one undetermined cell, and the second starting grid, drawn
// as a 4x4 window at rows and columns 2..5 of an 8x8 grid of zeros.
GraphWitness gol_block();
GraphWitness gol_grid2();
inline constexpr int kGolWindow = 2;

// Hexagon of six triangles around O. Ports are edge endpoints tagged "r"
// (edge marked for refinement) or "k"; nodes carry coordinates.
GraphWitness mesh_init();

EsrRule rt();
EsrRule rt_distinguishing();
// R_T where the new node U carries an attribute, breaking the rotations.
EsrRule rt_asymmetric();
EsrRule koch_rule();
EsrRule gol_rule();
// Refinement of a triangle with three, one and two marked edges.
EsrRule mesh_red();
EsrRule mesh_green();
EsrRule mesh_double();
// Pattern l of the two-match example: the attributed triangle, kept intact.
EsrRule match1_rule();
// Links two unlinked ports of neighboring nodes.
EsrRule toy_rule();
// A keeps a node and adds a port to it, B deletes a node.
EsrRule incompatible_a();
EsrRule incompatible_b();

std::vector<std::string> rule_set_names();
std::optional<std::vector<EsrRule>> rule_set(const std::string& name);

std::vector<std::string> graph_names();
std::optional<Pregraph> graph(const std::string& name);

}  // namespace portrewrite::examples
