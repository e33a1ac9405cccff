import io
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flashgraph.graph import (
    EDGE,
    VERTEX,
    ColumnSpec,
    GraphError,
    GraphParseError,
    PropertyError,
    PropertySchema,
    RuntimePropertyGraph,
    SchemaError,
    from_edges,
    load_edge_list,
    read_schema_file,
)
from flashgraph.values import (
    BOOL,
    FLOAT,
    ID,
    INT,
    INT_MAX,
    LIST_ID,
    NULL_VERTEX,
    STRING,
    default_value,
    format_value,
    pair_of,
    parse_type,
)


def edge_lists(max_n=64, max_m=200):
    return st.integers(1, max_n).flatmap(
        lambda n: st.tuples(
            st.just(n),
            st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=max_m),
        )
    )


class TestValues:
    def test_int_max_is_int64_max(self):
        assert INT_MAX == 2**63 - 1 == NULL_VERTEX

    @pytest.mark.parametrize(
        "text,vt",
        [("int", INT), ("float", FLOAT), ("bool", BOOL), ("ID", ID), ("string", STRING), ("list", LIST_ID),
         ("Pair<string, int>", pair_of(STRING, INT)),
         ("Pair<Pair<int, int>, ID>", pair_of(pair_of(INT, INT), ID))],
    )
    def test_parse_type(self, text, vt):
        assert parse_type(text) == vt

    def test_parse_type_unknown(self):
        with pytest.raises(ValueError):
            parse_type("double")

    def test_defaults(self):
        assert [default_value(t) for t in (INT, FLOAT, BOOL, ID, STRING, LIST_ID)] == [0, 0.0, False, NULL_VERTEX, "", ()]
        assert default_value(pair_of(STRING, INT)) == ("", 0)

    def test_format_value(self):
        assert format_value(True) == "true"
        assert format_value(0.1) == "0.1"
        assert format_value(np.int64(7)) == "7"
        assert format_value(("VLDB", 2020)) == "(VLDB,2020)"


class TestLoad:
    def test_undirected_path(self):
        g = load_edge_list(io.StringIO("0 1\n1 2\n"), directed=False)
        assert (g.n, g.m) == (3, 2)
        assert len(g.both_edges(1)) == 2

    def test_weighted_single_edge(self):
        g = load_edge_list(io.StringIO("0 1 5\n"), True, PropertySchema.static("weight", INT))
        assert g.kappa_get(0, "weight", edge=True) == 5
        assert g.out_edges(0) == [0]
        assert g.in_edges(1) == [0]

    def test_comments_and_blank_lines(self):
        g = load_edge_list(io.StringIO("# header\n\n0 3\n# mid\n2 1\n"))
        assert (g.n, g.m) == (4, 2)

    def test_bytes_source(self):
        g = load_edge_list(b"0 1\n")
        assert (g.n, g.m) == (2, 1)

    def test_random_stream_matches_rescan(self):
        rng = random.Random(11)
        lines = [f"{rng.randrange(5000)} {rng.randrange(5000)}" for _ in range(1000)]
        text = "\n".join(lines) + "\n"
        g = load_edge_list(io.StringIO(text))
        max_id = max(int(tok) for line in text.splitlines() for tok in line.split())
        assert g.n == max_id + 1
        assert g.m == sum(1 for line in text.splitlines() if line.strip())

    def test_multi_edges_kept(self):
        g = load_edge_list(io.StringIO("0 1\n0 1\n1 0\n"), directed=False)
        assert g.m == 3
        assert g.both(0) == [1, 1, 1]

    @pytest.mark.parametrize("text,lineno", [("0 1\nfoo\n", 2), ("0 x\n", 1), ("0 1\n-1 2\n", 2)])
    def test_malformed_line(self, text, lineno):
        with pytest.raises(GraphParseError) as exc:
            load_edge_list(io.StringIO(text))
        assert exc.value.line == lineno
        assert f"line {lineno}" in str(exc.value)

    def test_missing_weight_column(self):
        with pytest.raises(SchemaError):
            load_edge_list(io.StringIO("0 1 5\n1 2\n"), True, PropertySchema.static("weight", INT))

    def test_compact(self):
        g = load_edge_list(io.StringIO("10 20\n20 30\n"), compact=True)
        assert g.n == 3
        assert g.original_ids.tolist() == [10, 20, 30]
        assert g.out(0) == [1]

    def test_literal_ids_by_default(self):
        g = load_edge_list(io.StringIO("10 20\n"))
        assert g.n == 21

    def test_schema_file_and_vertex_columns(self):
        schema = io.StringIO(
            '{"name": "label", "type": "string", "column": 2}\n'
            '{"name": "name", "target": "vertex", "type": "string", "column": 1}\n'
            '{"name": "year", "target": "vertex", "type": "int", "column": 2}\n'
        )
        specs = read_schema_file(schema)
        assert [s.schema.target for s in specs] == [EDGE, VERTEX, VERTEX]
        g = load_edge_list(io.StringIO("0 1 write\n0 2 cite\n"), columns=specs,
                           vertex_source=io.StringIO("0 alice 0\n1 p1 2019\n2 p2 2020\n"))
        assert g.kappa_get(1, "year") == 2019
        assert g.kappa_get(0, "name") == "alice"
        assert g.kappa_get(1, "label", edge=True) == "cite"

    def test_bad_schema_line(self):
        with pytest.raises(SchemaError):
            read_schema_file(io.StringIO('{"name": "w", "type": "double", "column": 2}\n'))

    def test_vertex_columns_need_vertex_file(self):
        spec = ColumnSpec(PropertySchema.static("name", STRING, VERTEX), 1)
        with pytest.raises(SchemaError):
            load_edge_list(io.StringIO("0 1\n"), columns=[spec])

    def test_endpoint_out_of_range(self):
        with pytest.raises(GraphError):
            RuntimePropertyGraph(2, [0], [5])

    def test_dump_tsv(self):
        g = from_edges(2, [(0, 1, 7)], weight="weight").fresh()
        g.declare("@cc", INT)
        buf = io.StringIO()
        g.dump_tsv(buf)
        assert buf.getvalue().splitlines() == [
            "V\tid\tlabel\t@cc", "V\t0\tdefault\t0", "V\t1\tdefault\t0",
            "E\tid\tsrc\tdst\tlabel\tweight", "E\t0\t0\t1\tdefault\t7",
        ]


class TestRuntimeProperties:
    def test_declare_defaults(self):
        g = from_edges(3, [(0, 1)])
        g.declare("@dist", INT)
        assert [g.kappa_get(v, "@dist") for v in range(3)] == [0, 0, 0]

    @pytest.mark.parametrize("vt,default", [(FLOAT, 0.0), (BOOL, False), (ID, NULL_VERTEX), (LIST_ID, ())])
    def test_declare_default_per_type(self, vt, default):
        g = from_edges(2, [])
        g.declare("@x", vt)
        assert g.kappa_get(1, "@x") == default

    def test_duplicate(self):
        g = from_edges(2, [])
        g.declare("@dist", INT)
        with pytest.raises(SchemaError):
            g.declare("@dist", INT)

    def test_missing_prefix(self):
        g = from_edges(2, [])
        with pytest.raises(SchemaError):
            g.declare("dist", INT)
        with pytest.raises(SchemaError):
            g.declare_runtime_property(PropertySchema("dist", "runtime", VERTEX, INT))

    def test_column_sizes(self):
        g = from_edges(4, [(0, 1), (1, 2)])
        g.declare("@v", INT)
        g.declare("@e", FLOAT, EDGE)
        assert g.runtime_column("@v").size == 4
        assert g.runtime_column("@e", EDGE).size == 2

    def test_reserved_reads(self):
        g = from_edges(5, [(3, 4), (2, 3)])
        assert g.kappa_get(3, "id") == 3
        assert g.kappa_get(3, "out") == [4]
        assert g.kappa_get(3, "inE") == [1]
        assert g.kappa_get(0, "src", edge=True) == 3
        assert g.kappa_get(0, "dst", edge=True) == 4

    def test_read_your_write(self):
        g = from_edges(3, [])
        g.declare("@cc", INT)
        g.kappa_set(1, "@cc", 7)
        assert g.kappa_get(1, "@cc") == 7

    def test_static_read_only(self):
        g = from_edges(2, [(0, 1, 3)], weight="weight")
        with pytest.raises(PropertyError, match="read-only"):
            g.kappa_set(0, "weight", 4, edge=True)

    @pytest.mark.parametrize("key", ["id", "label", "out", "bothE"])
    def test_reserved_not_settable(self, key):
        g = from_edges(2, [])
        with pytest.raises(PropertyError):
            g.kappa_set(0, key, 1)

    def test_unknown_key(self):
        g = from_edges(2, [])
        with pytest.raises(PropertyError):
            g.kappa_get(0, "@nope")
        with pytest.raises(PropertyError):
            g.kappa_set(0, "@nope", 1)

    def test_type_mismatch(self):
        g = from_edges(2, [])
        g.declare("@b", BOOL)
        with pytest.raises(PropertyError):
            g.kappa_set(0, "@b", 3)

    def test_fresh_shares_topology_not_runtime(self):
        g = from_edges(2, [(0, 1)])
        g.declare("@x", INT)
        h = g.fresh()
        assert not h.has_property("@x")
        assert h.out(0) == [1]

    @given(st.sampled_from(["int", "float", "bool", "ID", "string", "list", "pair"]), st.data())
    @settings(max_examples=80, deadline=None)
    def test_set_get_round_trip(self, tname, data):
        values = {
            "int": st.integers(-(2**63), 2**63 - 1),
            "float": st.floats(allow_nan=False),
            "bool": st.booleans(),
            "ID": st.integers(0, 2**63 - 1),
            "string": st.text(max_size=8),
            "list": st.lists(st.integers(0, 100), max_size=5).map(lambda xs: tuple(sorted(xs))),
            "pair": st.tuples(st.text(max_size=4), st.integers(-5, 5)),
        }
        vt = pair_of(STRING, INT) if tname == "pair" else parse_type(tname)
        value = data.draw(values[tname])
        g = from_edges(3, [(0, 1)])
        g.declare("@p", vt)
        g.declare("@q", vt, EDGE)
        g.kappa_set(2, "@p", value)
        g.kappa_set(0, "@q", value, edge=True)
        assert g.kappa_get(2, "@p") == value
        assert g.kappa_get(0, "@q", edge=True) == value


class TestNeighborView:
    def test_undirected_both(self):
        g = from_edges(3, [(0, 1), (1, 2)], directed=False)
        assert g.neighbor_view(1, "both") == [0, 2]

    def test_directed_out_of_sink(self):
        g = from_edges(2, [(0, 1)])
        assert g.neighbor_view(1, "out") == []
        assert g.neighbor_view(1, "in") == [0]

    def test_directed_both_is_out_then_in(self):
        g = from_edges(3, [(1, 0), (2, 1), (1, 2)])
        # out edges 0 and 2, then in edge 1
        assert g.neighbor_view(1, "both", "edges") == [0, 2, 1]
        assert g.neighbor_view(1, "both") == [0, 2, 2]

    def test_label_filter(self):
        g = RuntimePropertyGraph(4, [0, 0, 0], [1, 2, 3], edge_labels=["write", "cite", "write"])
        keep = g.neighbor_view(0, "out", "edges", lambda e: g.kappa_get(e, "label", edge=True) == "write")
        assert keep == [0, 2]

    def test_grouped_vertices_have_no_neighbors(self):
        g = from_edges(2, [(0, 1)]).fresh()
        ids = g.add_grouped(2)
        assert ids.tolist() == [2, 3]
        assert g.neighbor_view(2, "both") == []

    @given(edge_lists(), st.booleans())
    @settings(max_examples=60, deadline=None)
    def test_incidence_and_degree_sums(self, nm, directed):
        n, edges = nm
        g = from_edges(n, edges, directed=directed)
        for e, (u, v) in enumerate(edges):
            if directed:
                assert e in g.out_edges(u)
                assert e in g.in_edges(v)
            else:
                assert e in g.both_edges(u)
                assert e in g.both_edges(v)
        if directed:
            assert sum(len(g.out_edges(v)) for v in range(n)) == len(edges)
            assert sum(len(g.in_edges(v)) for v in range(n)) == len(edges)
        else:
            assert sum(len(g.both_edges(v)) for v in range(n)) == 2 * len(edges)
            assert all(g.out(v) == g.in_(v) == g.both(v) for v in range(n))

    @given(edge_lists(max_n=20, max_m=60), st.booleans())
    @settings(max_examples=40, deadline=None)
    def test_ordering_by_edge_id_and_stable(self, nm, directed):
        n, edges = nm
        g = from_edges(n, edges, directed=directed)
        for v in range(n):
            for d in ("out", "in"):
                es = g.neighbor_view(v, d, "edges")
                assert es == sorted(es)
                assert es == g.neighbor_view(v, d, "edges")
            both = g.neighbor_view(v, "both", "edges")
            if directed:
                assert both == g.out_edges(v) + g.in_edges(v)
            else:
                assert both == sorted(both)
