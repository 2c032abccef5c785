#!/usr/bin/env python
# coding: utf-8

from imflow.cli.commands import main


if __name__ == "__main__":
    main()
