from wittdisp.workers import map_ordered


def test_map_ordered_keeps_input_order():
    items = list(range(20))
    assert map_ordered(lambda x: x * x, items, 4) == [x * x for x in items]


def test_map_ordered_serial_and_empty():
    assert map_ordered(str, [3, 1, 2]) == ["3", "1", "2"]
    assert map_ordered(str, [], 8) == []
