import pytest

from patch_lineage.diffparse import (
    DEFAULT_TAG_PREFIXES,
    MalformedDiff,
    changed_line_count,
    parse_unified_diff,
    render_diff,
    strip_tags,
)

from conftest import hunk, simple_diff

MINIMAL = "diff --git a/f b/f\n--- a/f\n+++ b/f\n@@ -1,1 +1,1 @@\n-x\n+y\n"

# Mail-style patch: series tag in the subject, message above the scissors
# line, diffstat, then the diff with a preprocessor line as hunk heading.
SERIES_MAIL_BODY = """\
udhcpc: gate ARP handling behind the config option

Only run the handler when the feature is compiled in,
otherwise leases fail on minimal builds.

---
 networking/udhcpc/default.script | 3 +++
 1 file changed, 3 insertions(+)

diff --git a/networking/udhcpc/default.script b/networking/udhcpc/default.script
index 23b9a1e..88aa1e0 100644
--- a/networking/udhcpc/default.script
+++ b/networking/udhcpc/default.script
@@ -1437,6 +1437,9 @@ #if ENABLE_FEATURE_UDHCPC_ARPING
 		case BOUND:
 		case RENEWING:
+			if (opt & OPT_a)
+				arpping_setup(&packet);
+			udhcp_run_script(&packet, "bound");
 			break;
 		default:
 			continue;
 		}
"""


class TestParseUnifiedDiff:
    def test_minimal_diff(self):
        diff = parse_unified_diff(MINIMAL)
        assert len(diff.files) == 1
        fd = diff.files[0]
        assert fd.path == "f"
        assert len(fd.hunks) == 1
        h = fd.hunks[0]
        assert h.insertions == ("y",)
        assert h.deletions == ("x",)
        assert h.heading == ""

    def test_hunk_before_file_header_is_malformed(self):
        text = "@@ -1,1 +1,1 @@\n" + MINIMAL
        with pytest.raises(MalformedDiff):
            parse_unified_diff(text)

    def test_change_line_outside_hunk_is_malformed(self):
        with pytest.raises(MalformedDiff):
            parse_unified_diff("diff --git a/f b/f\n--- a/f\n+++ b/f\n+y\n")

    def test_series_mail_body(self):
        diff = parse_unified_diff(SERIES_MAIL_BODY)
        assert len(diff.files) == 1
        fd = diff.files[0]
        assert fd.path == "networking/udhcpc/default.script"
        assert len(fd.hunks) == 1
        h = fd.hunks[0]
        assert h.heading == "#if ENABLE_FEATURE_UDHCPC_ARPING"
        assert len(h.insertions) == 3
        assert len(h.deletions) == 0

    def test_heading_is_text_after_second_marker(self):
        text = (
            "--- a/f\n+++ b/f\n"
            "@@ -10,2 +10,2 @@ static int foo(struct bar *b)\n"
            " ctx\n-a\n+b\n"
        )
        diff = parse_unified_diff(text)
        assert diff.files[0].hunks[0].heading == "static int foo(struct bar *b)"

    def test_multiple_files_and_hunks(self):
        text = (
            "diff --git a/one.c b/one.c\n--- a/one.c\n+++ b/one.c\n"
            "@@ -1,3 +1,4 @@ first\n ctx1\n-del1\n+ins1\n+ins2\n ctx2\n"
            "@@ -20,1 +21,1 @@ second\n-old\n+new\n"
            "diff --git a/two.c b/two.c\n--- a/two.c\n+++ b/two.c\n"
            "@@ -5,2 +5,1 @@ third\n-gone\n ctx\n"
        )
        diff = parse_unified_diff(text)
        assert [f.path for f in diff.files] == ["one.c", "two.c"]
        assert [len(f.hunks) for f in diff.files] == [2, 1]
        assert diff.total_changed_lines == 6

    def test_every_hunk_line_classified_exactly_once(self):
        diff = parse_unified_diff(SERIES_MAIL_BODY)
        h = diff.files[0].hunks[0]
        assert len(h.insertions) == 3
        assert len(h.deletions) == 0
        assert len(h.context) == 6
        # Counts in the header match the classified totals for this
        # well-formed patch.
        assert h.old_len == len(h.deletions) + len(h.context)
        assert h.new_len == len(h.insertions) + len(h.context)

    def test_rename_only_entry(self):
        text = (
            "diff --git a/old/name.c b/new/name.c\n"
            "similarity index 100%\n"
            "rename from old/name.c\n"
            "rename to new/name.c\n"
        )
        diff = parse_unified_diff(text)
        fd = diff.files[0]
        assert fd.meta_only
        assert fd.old_path == "old/name.c"
        assert fd.new_path == "new/name.c"
        assert diff.total_changed_lines == 0

    def test_mode_change_only_entry(self):
        text = (
            "diff --git a/script.sh b/script.sh\n"
            "old mode 100644\n"
            "new mode 100755\n"
        )
        diff = parse_unified_diff(text)
        assert diff.files[0].meta_only
        assert diff.files[0].path == "script.sh"

    def test_binary_entry(self):
        text = (
            "diff --git a/logo.png b/logo.png\n"
            "index 1111111..2222222 100644\n"
            "Binary files a/logo.png and b/logo.png differ\n"
        )
        diff = parse_unified_diff(text)
        assert diff.files[0].meta_only

    def test_new_and_deleted_files(self):
        text = (
            "diff --git a/new.c b/new.c\nnew file mode 100644\n"
            "--- /dev/null\n+++ b/new.c\n@@ -0,0 +1,2 @@\n+a\n+b\n"
            "diff --git a/gone.c b/gone.c\ndeleted file mode 100644\n"
            "--- a/gone.c\n+++ /dev/null\n@@ -1,1 +0,0 @@\n-z\n"
        )
        diff = parse_unified_diff(text)
        new, gone = diff.files
        assert new.path == "new.c" and new.old_path == "/dev/null"
        assert gone.path == "gone.c" and gone.new_path == "/dev/null"
        assert diff.total_changed_lines == 3

    def test_no_newline_marker_ignored(self):
        text = "--- a/f\n+++ b/f\n@@ -1,1 +1,1 @@\n-x\n\\ No newline at end of file\n+y\n\\ No newline at end of file\n"
        diff = parse_unified_diff(text)
        h = diff.files[0].hunks[0]
        assert h.insertions == ("y",)
        assert h.deletions == ("x",)

    def test_text_without_diff_yields_empty(self):
        diff = parse_unified_diff("just a discussion\nabout things\n")
        assert diff.files == ()
        assert diff.total_changed_lines == 0

    def test_trailing_signature_not_swallowed(self):
        text = MINIMAL + "-- \nJoe Developer\n"
        diff = parse_unified_diff(text)
        assert diff.total_changed_lines == 2

    def test_counts_trusted_to_delimit_plain_multifile(self):
        text = (
            "--- a/f\n+++ b/f\n@@ -1,2 +1,2 @@\n-x\n ctx\n+y\n"
            "--- a/g\n+++ b/g\n@@ -1,1 +1,1 @@\n-p\n+q\n"
        )
        diff = parse_unified_diff(text)
        assert [f.path for f in diff.files] == ["f", "g"]
        assert diff.files[0].hunks[0].deletions == ("x",)

    def test_damaged_counts_do_not_swallow_next_git_file(self):
        text = (
            "diff --git a/f b/f\n--- a/f\n+++ b/f\n@@ -1,9 +1,9 @@\n-x\n+y\n"
            "diff --git a/g b/g\n--- a/g\n+++ b/g\n@@ -1,1 +1,1 @@\n-p\n+q\n"
        )
        diff = parse_unified_diff(text)
        assert [f.path for f in diff.files] == ["f", "g"]

    def test_whitespace_damaged_context_counts_as_context(self):
        text = "--- a/f\n+++ b/f\n@@ -1,3 +1,3 @@\nctx-without-prefix\n-x\n+y\n\n"
        diff = parse_unified_diff(text)
        h = diff.files[0].hunks[0]
        assert "ctx-without-prefix" in h.context
        assert "" in h.context


class TestChangedLineCount:
    def test_minimal(self):
        assert changed_line_count(parse_unified_diff(MINIMAL)) == 2

    def test_two_hunks_hand_count(self):
        # (3 ins, 1 del) + (0 ins, 2 del) = 6
        diff = simple_diff(
            ("a.c", [hunk(ins=["1", "2", "3"], dels=["d"]), hunk(ins=[], dels=["e", "f"])])
        )
        assert changed_line_count(diff) == 6

    def test_pure_rename_counts_zero(self):
        text = (
            "diff --git a/x b/y\nrename from x\nrename to y\n"
            "diff --git a/f b/f\n--- a/f\n+++ b/f\n@@ -1,1 +1,1 @@\n-a\n+b\n"
        )
        diff = parse_unified_diff(text)
        rename = [f for f in diff.files if f.meta_only][0]
        assert rename.changed_line_count == 0
        assert changed_line_count(diff) == 2


class TestStripTags:
    def test_removes_maintainer_tag(self):
        assert strip_tags(["fix bug", "Signed-off-by: A <a@x>"]) == ["fix bug"]

    def test_empty(self):
        assert strip_tags([]) == []

    def test_no_colon_is_not_a_tag(self):
        assert strip_tags(["Acked-by someone"]) == ["Acked-by someone"]

    def test_case_insensitive_and_order_preserving(self):
        lines = ["keep one", "ACKED-BY: x", "keep two", "cc: list@x", "Fixes: abc1234"]
        assert strip_tags(lines) == ["keep one", "keep two"]

    def test_idempotent(self):
        lines = ["a", "Reviewed-by: r <r@x>", "b: not-a-tag", "Cc: x"]
        once = strip_tags(lines)
        assert strip_tags(once) == once

    def test_configurable_tag_set(self):
        lines = ["Custom-tag: x", "Signed-off-by: y"]
        custom = frozenset({"custom-tag"})
        assert strip_tags(lines, custom) == ["Signed-off-by: y"]
        assert "signed-off-by" in DEFAULT_TAG_PREFIXES


class TestRoundTrip:
    FIXTURES = [
        MINIMAL,
        SERIES_MAIL_BODY,
        (
            "diff --git a/one.c b/one.c\n--- a/one.c\n+++ b/one.c\n"
            "@@ -1,3 +1,4 @@ first\n ctx1\n-del1\n+ins1\n+ins2\n ctx2\n"
            "@@ -20,1 +21,1 @@ second\n-old\n+new\n"
        ),
        (
            "diff --git a/x b/y\nrename from x\nrename to y\n"
            "diff --git a/f b/f\n--- a/f\n+++ b/f\n@@ -3,2 +3,3 @@ head\n ctx\n-a\n+b\n+c\n"
        ),
        (
            "--- /dev/null\n+++ b/new.c\n@@ -0,0 +1,2 @@\n+a\n+b\n"
        ),
    ]

    @pytest.mark.parametrize("text", FIXTURES)
    def test_parse_render_parse_is_stable(self, text):
        once = parse_unified_diff(text)
        again = parse_unified_diff(render_diff(once))
        assert again == once
