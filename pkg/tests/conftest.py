from hypothesis import strategies as st

from vsc_lab.terms import App, Es, Lam, Var

NAMES = ("x", "y", "z")


def terms_strategy(pure: bool = False, names=NAMES):
    leaves = st.sampled_from(names).map(Var)

    def extend(children):
        options = [
            st.builds(Lam, st.sampled_from(names), children),
            st.builds(App, children, children),
        ]
        if not pure:
            options.append(st.builds(Es, children, st.sampled_from(names), children))
        return st.one_of(*options)

    return st.recursive(leaves, extend, max_leaves=8)


# acceptance lines collected by tests/test_acceptance.py
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[number])
