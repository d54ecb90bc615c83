"""Regenerates the planted result files used by the end-to-end acceptance check.

planted-a is correct exactly on programs with cyclomatic complexity <= 3,
planted-b on programs with cyclomatic complexity <= 2. Incorrect predictions
alternate (in problem-id order) between a wrong value of the right type and a
value of the wrong type. Correct predictions of structured values use
alternative spacing so that canonical comparison is exercised.
"""
import json
import pathlib

HERE = pathlib.Path(__file__).parent
CC = {
    "basic_str": 1, "basic_sum": 1, "class_stack": 5, "decimal_avg": 2, "dict_count": 4,
    "elif_chain": 6, "elif_nested": 4, "fact_rec": 3, "for_empty": 2, "for_squares": 3,
    "if_even": 3, "if_sign": 3, "closest_zero": 3, "match_cmd": 4, "match_if": 5,
    "nested_all": 6, "nested_for": 4, "nested_if": 4, "try_div": 3, "try_loop": 3,
    "try_parse": 3, "while_collatz": 2, "while_for": 3, "while_gcd": 3,
}
# expected output -> (correct variant, wrong value same type, wrong type)
VARIANTS = {
    "closest_zero": ("3", "4", "[3]"),
    "basic_sum": ("7", "8", "[7]"),
    "for_empty": ("0", "1", "[0]"),
    "while_collatz": ("8", "9", "[8]"),
    "try_parse": ("-1", "0", "[-1]"),
    "elif_chain": ("2", "3", "[2]"),
    "while_for": ("4", "5", "[4]"),
    "fact_rec": ("6", "7", "[6]"),
    "try_loop": ("9", "10", "[9]"),
    "nested_all": ("6", "7", "[6]"),
    "basic_str": ("EXEC!", "EXEC", "42"),
    "if_sign": ("negative", "positive", "42"),
    "match_cmd": ("halted", "running", "42"),
    "match_if": ("east", "west", "42"),
    "try_div": ("undefined", "error", "42"),
    "elif_nested": ("B", "C", "42"),
    "if_even": ("True", "False", "1"),
    "nested_if": ("True", "False", "1"),
    "for_squares": ("[1,4,9,16]", "[1, 4, 9]", "(1, 4, 9, 16)"),
    "nested_for": ("[[0,0,0],[0,1,2],[0,2,4]]", "[[0, 0, 0]]", "(0, 1, 2)"),
    "class_stack": ("[0,2,4,6]", "[6, 4, 2, 0]", "(0, 2, 4, 6)"),
    "while_gcd": ("(6,3)", "(3, 6)", "[6, 3]"),
    "dict_count": ("{'a':2, 'b':1, 'c':1}", "{'a': 1, 'b': 1, 'c': 1}", "['a', 'b', 'c']"),
    "decimal_avg": ("2.50", "2.4", "2"),
}


def planted(model, threshold):
    records = {"__meta__": {"planted_rule": f"correct iff cyclomatic <= {threshold}"}}
    wrong = 0
    for pid in sorted(CC):
        good, same_type, other_type = VARIANTS[pid]
        if CC[pid] <= threshold:
            records[pid] = {"predicted_output": good}
        else:
            records[pid] = {"predicted_output": same_type if wrong % 2 == 0 else other_type}
            wrong += 1
    out = HERE / "Experiment_Results" / "ER" / "result_stat" / f"{model}_fixture.json"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(records, indent=2, sort_keys=True) + "\n")


planted("planted-a", 3)
planted("planted-b", 2)
