from dicke_synth.cli import app

if __name__ == "__main__":
    app()
