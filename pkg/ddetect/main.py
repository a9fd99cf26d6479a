from commands import DetectabilityCommands

cli = DetectabilityCommands().group


def main():
    cli(prog_name="ddetect")


if __name__ == "__main__":
    main()
