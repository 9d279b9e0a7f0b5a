# %% [markdown]
# # Finding unsafe functions in Rust sources
#
# The scanner tokenizes Rust well enough to skip comments, strings and raw
# strings, then records every function whose body (or signature) holds the
# `unsafe` keyword.

# %%
from unsafefuzz.unsafescan import scan_source, write_manifest

source = '''
pub struct Bytes { start: *const u8, end: *const u8, cursor: *const u8 }

impl Bytes {
    fn store_at(&self, n: usize, v: u8) {
        unsafe {
            let ptr = self.cursor.add(n);
            std::ptr::write(ptr, v);
        }
    }

    fn describe(&self) -> &'static str {
        // unsafe is only mentioned here
        "no unsafe { } in this string either"
    }
}

unsafe impl Send for Bytes {}
'''

result = scan_source([("bytes.rs", source)])
print(write_manifest(result.manifest), end="")

# %% [markdown]
# `unsafe impl` has no enclosing function, so it becomes a warning and never
# enters the manifest.

# %%
for w in result.warnings:
    print(w)
