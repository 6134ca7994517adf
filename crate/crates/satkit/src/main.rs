fn main() {
    // Die quietly on a closed pipe (e.g. `satkit generate | head`) instead
    // of panicking mid-print.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    std::process::exit(satkit::harness::cli::run());
}
