"""
Gerenciador de estudos da casca fina.

Subcomandos:
    check     - suíte de propriedades
    sphere    - execução única na esfera
    shell     - execução única na casca (primeiro ε da lista)
    converge  - varredura de convergência em ε

Códigos de saída: 0 sucesso, 1 verificação ou célula com falha, 2 erro de
configuração ou de uso.
"""

import argparse
import asyncio
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

from app.core.excecoes import ErroConfiguracao, ErroPersistencia, ErroSimulacao, ErroUso
from app.core.orquestrador import (
    ConfiguracaoEstudo,
    carregar_configuracao_estudo,
    executar_celula_casca,
    executar_estudo_convergencia,
    executar_referencia_esfera,
)
from app.core.suite_propriedades import ContextoSuite, ResultadoVerificacao, executar_suite
from app.db.persistencia import carregar_json, salvar_campo, salvar_csv, salvar_json, salvar_relatorio
from helpers_compartilhados.helpers import (
    ConfiguracaoAmbiente,
    carregar_configuracao_ambiente,
    configurar_logging,
    preparar_diretorio_saida,
)

logger = logging.getLogger(__name__)

SAIDA_SUCESSO = 0
SAIDA_FALHA = 1
SAIDA_CONFIGURACAO = 2


# Cores para terminal
class Cores:
    """Códigos de cores ANSI para formatação no terminal."""

    VERDE = "\033[92m"
    AMARELO = "\033[93m"
    VERMELHO = "\033[91m"
    AZUL = "\033[94m"
    RESET = "\033[0m"
    NEGRITO = "\033[1m"


def print_colorido(texto: str, cor: str = Cores.RESET):
    print(f"{cor}{texto}{Cores.RESET}")


def print_titulo(titulo: str):
    """
    Imprime um título formatado com destaque.

    Examples:
        >>> print_titulo("ESTUDO DE CONVERGÊNCIA")
    """
    print("\n" + "=" * 60)
    print_colorido(f"  {titulo}", Cores.NEGRITO + Cores.AZUL)
    print("=" * 60)


def print_sucesso(mensagem: str):
    print_colorido(f"✅ {mensagem}", Cores.VERDE)


def print_erro(mensagem: str):
    print_colorido(f"❌ {mensagem}", Cores.VERMELHO)


def print_aviso(mensagem: str):
    print_colorido(f"⚠️  {mensagem}", Cores.AMARELO)


def print_info(mensagem: str):
    print_colorido(f"ℹ️  {mensagem}", Cores.AZUL)


# === ARGUMENTOS ===


def _lista_eps(texto: str) -> List[float]:
    try:
        return [float(parte) for parte in texto.split(",") if parte.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"lista de ε inválida: {texto}") from e


def montar_parser() -> argparse.ArgumentParser:
    """Parser com os quatro subcomandos e as flags comuns do estudo."""
    comum = argparse.ArgumentParser(add_help=False)
    # default=None: só sobrescreve o arquivo de configuração quando informado
    comum.add_argument("--config", type=Path, help="Arquivo JSON com os campos do estudo")
    comum.add_argument("--eps-list", type=_lista_eps, default=None, help="Espessuras, ex.: 0.4,0.2,0.1")
    comum.add_argument("--lmax", type=int, default=None)
    comum.add_argument("--nr", type=int, default=None)
    comum.add_argument("--nu", type=float, default=None)
    comum.add_argument("--dt", type=float, default=None)
    comum.add_argument("--t-final", type=float, default=None)
    comum.add_argument("--mode", type=str.upper, choices=["STOKES", "NSE"], default=None)
    comum.add_argument("--stochastic", action="store_true", default=None)
    comum.add_argument("--paths", type=int, default=None)
    comum.add_argument("--seed", type=int, default=None)
    comum.add_argument("--moment-p", type=float, default=None)
    comum.add_argument("--out", type=Path, default=None, help="Diretório de saída")

    parser = argparse.ArgumentParser(description="Estudos numéricos de Navier–Stokes em cascas esféricas finas")
    subparsers = parser.add_subparsers(dest="comando", required=True)

    check = subparsers.add_parser("check", parents=[comum], help="Suíte de propriedades")
    check.add_argument("--seletor", default="todas", help="Grupos separados por vírgula (padrão: todas)")
    check.add_argument("--casos", type=int, default=200, help="Casos aleatórios da álgebra de operadores")

    subparsers.add_parser("sphere", parents=[comum], help="Execução única na esfera")
    subparsers.add_parser("shell", parents=[comum], help="Execução única na casca (primeiro ε)")

    converge = subparsers.add_parser("converge", parents=[comum], help="Varredura de convergência em ε")
    converge.add_argument("--trabalhadores", type=int, default=None, help="Células simultâneas")
    return parser


MAPA_FLAGS = {
    "eps_list": "eps_list",
    "lmax": "lmax",
    "nr": "nr",
    "nu": "nu",
    "dt": "dt",
    "t_final": "t_final",
    "mode": "mode",
    "stochastic": "stochastic",
    "paths": "paths",
    "seed": "seed",
    "moment_p": "moment_p",
    "out": "out",
}


def montar_configuracao(args: argparse.Namespace, ambiente: ConfiguracaoAmbiente) -> ConfiguracaoEstudo:
    """
    Combina padrões, ambiente, arquivo --config e flags (nesta precedência).

    Raises:
        ErroConfiguracao: Configuração inválida.
    """
    dados: Dict[str, Any] = {"out": str(ambiente.diretorio_saida)}
    if args.config is not None:
        try:
            dados.update(carregar_json(args.config))
        except ErroPersistencia as e:
            raise ErroConfiguracao(f"Arquivo de configuração ilegível: {e.mensagem}", e.tipo) from e
    for atributo, chave in MAPA_FLAGS.items():
        valor = getattr(args, atributo, None)
        if valor is not None:
            dados[chave] = str(valor) if isinstance(valor, Path) else valor
    return carregar_configuracao_estudo(dados)


# === COMANDOS ===


def _imprimir_tabela(resultados: List[ResultadoVerificacao]) -> None:
    for resultado in resultados:
        valor = "-" if resultado.valor is None else f"{resultado.valor:.3e}"
        limite = "-" if resultado.limite is None else f"{resultado.limite:.1e}"
        linha = f"[{resultado.grupo:>13}] {resultado.nome:<36} valor={valor:>10} limite={limite:>8}"
        if resultado.passou:
            print_sucesso(linha)
        else:
            print_erro(f"{linha} {resultado.detalhe}")


async def comando_check(args: argparse.Namespace, config: ConfiguracaoEstudo, ambiente: ConfiguracaoAmbiente) -> int:
    print_titulo("SUÍTE DE PROPRIEDADES")
    # Sem moment_p explícito a suíte usa o próprio padrão (p = 4)
    momento_p = config.momento_p if "momento_p" in config.model_fields_set else ContextoSuite.momento_p
    contexto = ContextoSuite(casos=args.casos, semente=config.semente, momento_p=momento_p)
    resultados = await asyncio.to_thread(executar_suite, args.seletor, contexto)
    _imprimir_tabela(resultados)
    diretorio = preparar_diretorio_saida(Path(config.saida))
    salvar_json({"verificacoes": [r.model_dump() for r in resultados]}, diretorio / "suite.json")

    falhas = [r for r in resultados if not r.passou]
    if falhas:
        print_erro(f"{len(falhas)} de {len(resultados)} verificações falharam")
        return SAIDA_FALHA
    print_sucesso(f"Todas as {len(resultados)} verificações passaram")
    return SAIDA_SUCESSO


async def comando_esfera(args: argparse.Namespace, config: ConfiguracaoEstudo, ambiente: ConfiguracaoAmbiente) -> int:
    print_titulo("EXECUÇÃO NA ESFERA")
    trajetoria = await asyncio.to_thread(executar_referencia_esfera, config, 0)
    diretorio = preparar_diretorio_saida(Path(config.saida))
    salvar_csv(trajetoria.para_linhas(), diretorio / "sphere.csv")
    salvar_campo(trajetoria.final, diretorio / "sphere_final.bin")
    print_info(f"‖u(T)‖² = {trajetoria.energias()[-1]:.6e}")
    if not trajetoria.identidade_ok:
        print_aviso(f"Resíduo da identidade de energia acima da cota: {trajetoria.residuo_energia:.3e}")
    print_sucesso(f"Trajetória gravada em '{diretorio}'")
    return SAIDA_SUCESSO


async def comando_casca(args: argparse.Namespace, config: ConfiguracaoEstudo, ambiente: ConfiguracaoAmbiente) -> int:
    eps = config.lista_eps[0]
    print_titulo(f"EXECUÇÃO NA CASCA (ε = {eps:g})")
    trajetoria = await asyncio.to_thread(executar_celula_casca, config, eps, 0)
    diretorio = preparar_diretorio_saida(Path(config.saida))
    salvar_csv(trajetoria.para_linhas(), diretorio / f"shell_eps_{eps:g}.csv")
    salvar_campo(trajetoria.campo(-1), diretorio / f"shell_eps_{eps:g}_final.bin")
    salvar_campo(trajetoria.alphas[-1], diretorio / f"shell_eps_{eps:g}_alpha.bin")
    print_info(f"‖ũ(T)‖² = {trajetoria.energias()[-1]:.6e}, ‖β̃(T)‖² = {trajetoria.energia_flutuacao[-1]:.6e}")
    if not trajetoria.identidade_ok:
        print_aviso(f"Resíduo da identidade de energia acima da cota: {trajetoria.residuo_energia:.3e}")
    print_sucesso(f"Trajetória gravada em '{diretorio}'")
    return SAIDA_SUCESSO


async def comando_convergencia(
    args: argparse.Namespace, config: ConfiguracaoEstudo, ambiente: ConfiguracaoAmbiente
) -> int:
    print_titulo("ESTUDO DE CONVERGÊNCIA")
    trabalhadores = args.trabalhadores or ambiente.num_trabalhadores
    relatorio = await executar_estudo_convergencia(config, trabalhadores)
    arquivos = salvar_relatorio(relatorio, preparar_diretorio_saida(Path(config.saida)))

    for resultado in relatorio.por_eps:
        if resultado.erro_sup_l2 is None:
            print_erro(f"ε = {resultado.eps:g}: sem caminhos concluídos")
        else:
            print_info(
                f"ε = {resultado.eps:g}: sup L² = {resultado.erro_sup_l2:.4e}, "
                f"L² integrado = {resultado.erro_l2_integrado:.4e}, D(A⁻¹) = {resultado.erro_sup_dainv:.4e}"
            )
    if relatorio.ajuste.taxa is not None:
        print_info(f"Taxa ajustada: {relatorio.ajuste.taxa:.3f} (resíduo {relatorio.ajuste.residuo:.2e})")
    if relatorio.ajuste.aviso:
        print_aviso(relatorio.ajuste.aviso)
    if not relatorio.erros_decrescentes:
        print_aviso("Erros sup L² não são estritamente decrescentes em ε")
    print_sucesso(f"Relatório gravado em '{arquivos['relatorio']}'")
    return SAIDA_FALHA if relatorio.possui_falhas else SAIDA_SUCESSO


# Mapeamento subcomando -> função
COMANDOS: Dict[str, Callable] = {
    "check": comando_check,
    "sphere": comando_esfera,
    "shell": comando_casca,
    "converge": comando_convergencia,
}


# === FUNÇÃO MAIN ===


async def main(argv: Optional[List[str]] = None) -> int:
    """
    Examples:
        >>> # python gerenciador_estudos.py check --seletor poincare
        >>> # python gerenciador_estudos.py converge --eps-list 0.4,0.2,0.1,0.05 --out resultados
    """
    args = montar_parser().parse_args(argv)
    try:
        ambiente = carregar_configuracao_ambiente()
        configurar_logging(
            "estudos", ambiente.diretorio_logs, ambiente.nivel_log, ambiente.dias_retencao_logs
        )
        config = montar_configuracao(args, ambiente)
        return await COMANDOS[args.comando](args, config, ambiente)
    except (ErroConfiguracao, ErroUso) as e:
        print_erro(f"{e.tipo}: {e.mensagem}")
        return SAIDA_CONFIGURACAO
    except ErroSimulacao as e:
        logger.error(f"Falha na execução: {e.mensagem}", exc_info=True)
        print_erro(f"{e.tipo}: {e.mensagem}")
        return SAIDA_FALHA
    except KeyboardInterrupt:
        print_colorido("\n\n🛑 Interrompido pelo usuário", Cores.AMARELO)
        return SAIDA_FALHA


if __name__ == "__main__":
    sys.exit(asyncio.run(main()))
