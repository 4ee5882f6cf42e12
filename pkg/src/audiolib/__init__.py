"""audiolib: self-hostable audio-library automation for volunteer readers,
visually-impaired members, and the admins who moderate between them."""

__version__ = "0.1.0"
