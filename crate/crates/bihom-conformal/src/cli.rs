//! Definition files and commands.
